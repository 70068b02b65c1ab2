from .adadelta import AdaDeltaState, adadelta_step

__all__ = ["AdaDeltaState", "adadelta_step"]

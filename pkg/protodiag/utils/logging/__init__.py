from .setup import disable_all_logging, enable_all_logging, get_logger, set_global_logging_level, setup_logging

__all__ = ["setup_logging", "get_logger", "set_global_logging_level", "disable_all_logging", "enable_all_logging"]

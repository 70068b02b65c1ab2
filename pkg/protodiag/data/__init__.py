from .manifest import Manifest, ManifestEntry, ManifestReader, load_manifest, write_signal
from .models import Dataset, Domain, LabeledWindow, PairBatch, RawSignal
from .sampling import (
    check_permutation,
    inverse_permutation,
    permute_labels,
    sample_labeled_batch,
    sample_pairs,
    select_few_shot,
)
from .synth import DomainShift, SynthGenerator, SynthSpec, synth_generate
from .windowing import slide_window, window_count

__all__ = [
    "Dataset",
    "Domain",
    "DomainShift",
    "LabeledWindow",
    "Manifest",
    "ManifestEntry",
    "ManifestReader",
    "PairBatch",
    "RawSignal",
    "SynthGenerator",
    "SynthSpec",
    "check_permutation",
    "inverse_permutation",
    "load_manifest",
    "permute_labels",
    "sample_labeled_batch",
    "sample_pairs",
    "select_few_shot",
    "slide_window",
    "synth_generate",
    "window_count",
    "write_signal",
]

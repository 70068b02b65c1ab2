from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import parse_int_list, run_guarded, write_invocation
from protodiag.data import ManifestReader, check_permutation
from protodiag.data.cwru import SHUFFLED_LABELS


@click.command("permute-labels")
@optgroup.group("IO")
@optgroup.option(
    "--input",
    "-i",
    "input_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    required=True,
    help="Manifest to relabel",
)
@optgroup.option(
    "--output",
    "-o",
    "output_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Relabeled manifest to write",
)
@optgroup.group("Mapping")
@optgroup.option(
    "--permutation",
    "-p",
    default=",".join(str(k) for k in SHUFFLED_LABELS),
    show_default=True,
    help="Comma-separated images of labels 0..N-1",
)
def permute_labels(input_path: Path, output_path: Path, permutation: str) -> None:
    """Write a copy of a manifest with every label k replaced by permutation[k]"""
    if output_path.resolve() == input_path.resolve():
        raise click.UsageError("refusing to overwrite the input manifest")
    mapping = parse_int_list(permutation) or []

    def action() -> str:
        manifest = ManifestReader.read(input_path)
        class_count = manifest.class_count or max(e.label for e in manifest.entries) + 1
        images = check_permutation(mapping, class_count)
        entries = [(e.file, images[e.label], e.domain) for e in manifest.entries]
        ManifestReader.write(output_path, entries, manifest.class_count)
        write_invocation(
            output_path,
            "permute-labels",
            {"input": input_path, "output": output_path, "permutation": images},
        )
        return f"permute-labels: {len(entries)} entries relabeled by {images} -> {output_path}"

    run_guarded(action)

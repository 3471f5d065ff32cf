"""Uncertainty decomposition and downstream-task evaluation for segmentation.

The heavy lifting lives in the compiled ``_uqeval`` extension; this package
re-exports it and adds a couple of conveniences for numpy users.
"""

import json as _json

from ._uqeval import (  # noqa: F401
    PlattParams,
    UqevalError,
    __version__,
    ace,
    aggregate,
    annotator_variance_map,
    assign_measures,
    auroc,
    bma,
    border_length,
    decompose,
    decompose_no_eu,
    delta,
    dice,
    emit_reports,
    fit_platt,
    ged,
    ncc,
    read_grid,
    read_label_map,
    shannon_entropy,
    synthesize,
    validate_manifest,
    write_grid,
    write_label_map,
)
from ._uqeval import run_pipeline as _run_pipeline


def run_pipeline(manifest, config=None):
    """Evaluate a manifest; returns the result bundle as a dict.

    ``config`` may be a dict or a JSON string with RunConfig keys.
    """
    if config is None:
        text = ""
    elif isinstance(config, str):
        text = config
    else:
        text = _json.dumps(config)
    return _json.loads(_run_pipeline(str(manifest), text))

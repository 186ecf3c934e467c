"""Salient time-step selection for raster time series."""
import json as _json

from ._keystep import (  # noqa: F401
    BoundsError,
    ConstraintError,
    Dataset,
    EmptyDataError,
    FormatError,
    InvalidCodeError,
    IoError,
    KeystepError,
    NotFoundError,
    brute_force_select,
    codes,
    distance_cost,
    even_selection,
    export_stack,
    from_array,
    ingest_stack,
    load_latent_codes,
    project_2d,
    reconstruct,
    save_latent_codes,
    select_salient,
    statistical_cost,
    structural_cost,
    structural_cost_matrix,
    synthesize,
)
from . import _keystep


def select(dataset, k, codes=None, **params):
    """Select k salient steps; keyword params mirror the POST /select body."""
    body = dict(params, k=k)
    return _json.loads(_keystep.select_json(dataset, _json.dumps(body), codes))


def evaluate(dataset, methods=("dp", "even", "arc"), ks=(5, 10, 20), beta_sweep=False):
    """Reconstruction report as a dict (psnr_db is the string "inf" for exact rows)."""
    return _json.loads(_keystep.evaluate_json(dataset, list(methods), list(ks), beta_sweep))

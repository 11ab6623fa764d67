"""Centralized numeric tolerances.

Every rank decision, membership test and fit gate in the package reads its
threshold from a single Tolerances record so that acceptance runs are
reproducible and the configuration can be hashed into run reports.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared across the package.

    Relative thresholds state their reference scale in the comment.
    """

    tau_rank: float = 1e-8            # SVD rank cut, relative to sigma_1
    membership: float = 1e-9          # cylinder membership, unit-max-coeff + circumdiameter scaling
    residual_rel: float = 1e-10       # solver residual, relative to s12^2
    newton_step_rel: float = 1e-14    # Newton convergence, relative to 1 + |e|
    newton_max_iter: int = 50
    cluster_radius_rel: float = 1e-6  # root clustering, relative to sqrt(s12^2+s13^2+s23^2)
    imag_tol_rel: float = 1e-8        # "real solution" cut, relative to the same scale
    continuum_rel: float = 1e-9       # zero-eliminant test, relative to a perturbed coefficient scale
    fit_rms: float = 1e-6             # implicit-fit acceptance on held-out rms
    fit_gap: float = 10.0             # sigma_second_smallest / sigma_smallest ambiguity gate
    component_match: float = 1e-6     # component membership, normalized value
    membership_grad_floor: float = 1e-3  # gradient floor in the membership metric, fraction of coefficient scale
    cusp_ratio: float = 1e-3          # cusp gradient norm over mu=2 median
    degenerate_rel: float = 1e-12     # vertex/collinearity detection, relative to 2R
    z_clamp: float = 1e-9             # locate_center clamp, z^2 relative to (2R)^2
    i3_rel: float = 1e-9              # i3 projection coincidence, relative to 2R
    max_order: int = 6                # Macaulay stabilization horizon
    c2_floor_factor: float = 1e-3     # c2 noise floor as a fraction of the generic minimum

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        """Stable hash of the configuration, stamped into run reports."""
        blob = json.dumps(self.as_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "Tolerances":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - fields
        if unknown:
            raise ValueError(f"unknown tolerance fields: {sorted(unknown)}")
        return cls(**data)


DEFAULT_TOLERANCES = Tolerances()

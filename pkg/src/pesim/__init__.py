"""Spectral Galerkin solver and small-noise large-deviation engine for the
3D primitive equations of the ocean on the unit box."""

from .basis import (BasisMismatchError, BasisSet, CollocationGrid, Field,
                    GridTooSmallError, ModeIndex, SpectralState, build_basis,
                    from_collocation, inner_product, norm_s, to_collocation,
                    unit_mode_state, zero_state)
from .operators import (BarotropicPressure, DiagnosticField, apply_A,
                        divergence_residual, eval_B, eval_G, eval_G_pressure,
                        project_barotropic, solve_pb, split_barotropic,
                        vertical_velocity)

__version__ = "0.1.0"

"""Dehn filling charts, holonomies, pseudo volumes and rigidity checks."""

from .manifold import (CuspShape, DescriptorError, ManifoldDescriptor,
                       NZPotential, load_manifold, serialize_manifold,
                       synthesize_product)
from .series import TruncatedSeries, phi_series, v_series
from .solver import (EllipticSolutionError, FillingCoefficient,
                     FillingSolution, SolverError, SolverOptions,
                     bezout_pair, enumerate_slopes, holonomy_product,
                     scan_products, solve_filling)
from .volume import (PseudoVolume, VolumeError, congruent_mod_ipisq,
                     pseudo_volume, reduce_mod_ipisq)
from .relations import (AlgebraicNumber, RelationQuery, RelationResult,
                        cusp_symmetry_test, find_integer_relation, height,
                        multiplicative_independence, northcott_filter,
                        pvol_independence, quadraticity_test)
from .anomaly import (Containment, Form, LemmaClassification,
                      SubgroupLattice, anomaly_series_criterion,
                      classify_2x4_same_shape, classify_2x4_two_shapes,
                      classify_codim2_containment, jacobian_rank,
                      normalize_subgroup)
from .tube import (TorusModulus, TubeSpec, appendix_rigidity_replay,
                   boundary_modulus, radius_from_volume, reduce_modulus,
                   symmetric_torus_test, tube_volume)
from .fixtures import load_fixture

__version__ = "0.1.0"

"""Topology of closed surfaces: gluing words, cell complexes, fundamental
groups, Morse functions and gradient-like flows on charted surfaces."""
from .classify import Kind, SurfaceType, canonical_word, classify_surface, homeomorphic
from .complex import (CellComplex, Edge, Face, ValidationReport, euler_characteristic,
                      orientability, parse_complex, validate_complex, word_to_complex)
from .errors import *  # noqa: F401,F403
from .expr import Expression, evaluate_constant, parse_expression
from .fields import (ScalarField, SurfaceChart, VectorField, central_gradient, central_hessian,
                     field_from_expression, vector_field_from_expressions)
from .flow import (FlowOptions, MorseSmaleGraph, MSVerdict, Separatrix, SingularPoint, Trajectory,
                   classify_jacobian, dump_trajectories, find_singular_points, gradient_field,
                   integrate_batch, integrate_trajectory, morse_smale_check, ms_graph,
                   ms_graph_isomorphic, separatrices)
from .groups import (AbelianInvariants, GroupPresentation, abelianization, amalgamated_product,
                     graph_free_rank, pi1_from_complex, smith_normal_form, spanning_tree)
from .morse import (CriticalPoint, MorseReport, SolverOptions, SphereModel, euler_from_indices,
                    find_critical_points, hessian, is_morse, level_component_count, morse_index,
                    reeb_sphere_check, sphere_height_model)
from .words import (EdgeLetter, GluingWord, format_word, free_reduce, invert_word,
                    parse_gluing_word, parse_word)

__version__ = "0.1.0"

"""Projective cubature on real, complex and quaternionic unit spheres.

Construction (recursive dimension lift), verification (integral identity,
weights, norms, pairwise separation), and the bound engine reproducing
tables of upper bounds for the minimal number of vectors in an isometric
embedding of an m-dimensional Hilbert space into l_p^n.
"""

from .fields import (
    FIELD_C,
    FIELD_H,
    FIELD_R,
    FIELDS,
    FieldTag,
    parse_field,
)
from .jacobi import (
    GAUSS,
    RADAU_ZERO,
    QuadratureError,
    QuadratureRule,
    chi_moment,
    gauss_rule,
    radau_zero_rule,
    recurrence_coefficients,
)
from .construct import (
    DEFAULT_NODE_CAP,
    NODE_CAP_ENV,
    ConstructionError,
    CubatureFormula,
    NodeBudgetError,
    base_orthonormal,
    base_polygon,
    base_singleton,
    construct,
    default_node_cap,
    field_descent,
    lift,
    nu_constructive,
    project_to_K,
    unit_sphere_rule,
)
from .verify import (
    VerificationReport,
    check,
    default_tol,
    embedding_defect,
    gamma,
    max_residual_over,
    min_projective_gap,
    monte_carlo_gamma,
    residual,
    standard_directions,
)
from .bounds import (
    BoundFact,
    asymptotic_constant,
    closed_form_complex_m2,
    dim_phi,
    gub,
    index_reduction,
    iterated_bound,
    koly_bounds,
    nu,
    recursion_bound,
)
from .tables import (
    DerivedRow,
    ResultRow,
    TableMismatch,
    derive_table,
    derive_tables,
    input_facts,
    input_table_csv,
    table_csv,
)
from .io import (
    SCHEMA_VERSION,
    FormulaDocument,
    MalformedDocumentError,
    formula_from_document,
    formula_to_document,
    read_formula,
    write_formula,
)

__version__ = "1.0.0"

__all__ = [
    "FIELD_R",
    "FIELD_C",
    "FIELD_H",
    "FIELDS",
    "FieldTag",
    "parse_field",
    "GAUSS",
    "RADAU_ZERO",
    "QuadratureError",
    "QuadratureRule",
    "chi_moment",
    "gauss_rule",
    "radau_zero_rule",
    "recurrence_coefficients",
    "DEFAULT_NODE_CAP",
    "NODE_CAP_ENV",
    "ConstructionError",
    "CubatureFormula",
    "NodeBudgetError",
    "base_orthonormal",
    "base_polygon",
    "base_singleton",
    "construct",
    "default_node_cap",
    "field_descent",
    "lift",
    "nu_constructive",
    "project_to_K",
    "unit_sphere_rule",
    "VerificationReport",
    "check",
    "default_tol",
    "embedding_defect",
    "gamma",
    "max_residual_over",
    "min_projective_gap",
    "monte_carlo_gamma",
    "residual",
    "standard_directions",
    "BoundFact",
    "asymptotic_constant",
    "closed_form_complex_m2",
    "dim_phi",
    "gub",
    "index_reduction",
    "iterated_bound",
    "koly_bounds",
    "nu",
    "recursion_bound",
    "DerivedRow",
    "ResultRow",
    "TableMismatch",
    "derive_table",
    "derive_tables",
    "input_facts",
    "input_table_csv",
    "table_csv",
    "SCHEMA_VERSION",
    "FormulaDocument",
    "MalformedDocumentError",
    "formula_from_document",
    "formula_to_document",
    "read_formula",
    "write_formula",
    "__version__",
]

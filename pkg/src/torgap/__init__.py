"""torgap: torsion homology growth and spectral-gap models for twisted gluings.

Exact integer lattice algebra (Smith forms, quotient groups), symplectic
mapping-class spectra with transversality and decay diagnostics, torsion of
twisted Heegaard-type gluings, a finite slice model of the coexact-form gap
with its cofilling duality, and expander-graph gap propagation.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DimensionError,
    DisconnectedGraphError,
    FalsifiedInvariantError,
    InconsistentClassError,
    PreconditionError,
    SurjectivityError,
    TorgapError,
)
from .exact import (
    FiniteAbelianGroup,
    IntMatrix,
    SmithForm,
    int_matrix_power,
    lattice_sum,
    quotient_group,
    smith_normal_form,
)
from .symplectic import (
    AngleTable,
    ConditionReport,
    DecayReport,
    EigenSplit,
    LagrangianPair,
    SymplecticAction,
    check_conditions,
    classify_spectrum,
    decay_constant_check,
    principal_angles,
    standard_symplectic_form,
    subspace_angle,
    uniform_transversality_scan,
)
from .torsion import (
    BlockChainSpec,
    ChainHomologyReport,
    GluingFamily,
    InterfaceSpec,
    RateReport,
    chain_homology,
    complementary_pair,
    decaying_gap_family,
    equal_lagrangian_pair,
    genus2_action,
    glued_torsion,
    growth_rate,
    misaligned_pair,
    standard_chain,
    torsion_order_term,
    uniform_gap_family,
    unimodular_block_action,
)
from .slices import (
    AuditRow,
    AuditTable,
    ChainModel,
    CofillResult,
    DeltaReport,
    FillingOperator,
    GapReport,
    PushedPrimitive,
    SequenceVerdict,
    SliceModel,
    SurjectivityReport,
    TransversalityReport,
    bass_note_scan,
    build_chain_model,
    build_slice_model,
    coexact_gap,
    cofill,
    exp_decay_check,
    pushed_primitive,
    raw_metric_gap,
    sequence_lemma_check,
    slice_norm,
    surjectivity,
    torsion_gap_audit,
    transversality_decomposition,
)
from .expander import (
    BlockGraph,
    BlockMesh,
    GapBound,
    Graph,
    averaging_operator,
    block_poincare_constant,
    complete_graph,
    cycle_graph,
    graph_gap,
    grid_mesh,
    path_graph,
    poincare_constant,
    propagation_bound,
    random_regular_graph,
    single_edge_mesh,
    single_vertex_mesh,
)
from .scenarios import RunRecord, ScenarioConfig, emit_plot_data, load_config, run

"""Two-stroke engine cycle: permutation work stroke, rethermalizing heat stroke.

One cycle acts on the product state sigma_s (x) tau_h (x) tau_c:

1. **work stroke** — a permutation ``S`` of basis states exchanges the
   populations of each swap pair |u_i> <-> |d_i>;
2. **heat stroke** — the hot and cold qubits are traced out and replaced
   by fresh Gibbs states, while the catalyst (never bath-coupled) keeps
   whatever marginal the work stroke left it.

Heat bookkeeping uses operator traces of the bare Hamiltonians as ground
truth, Q_k = Tr[H_0k (rho - S rho S^+)], and cross-checks the equivalent
pairwise form sum_i d_eps_i^k * delta_p_i on every run.  Positive Q_k
means energy drawn *from* bath k into the machine; positive work means
work extracted.

The cycle is exactly periodic iff the catalyst marginal is restored by
the work stroke; for diagonal states this is equivalent to all pair
flows delta_p_i being equal ("simple" permutations), and
:func:`solve_catalyst` finds diagonal catalyst populations with that
property by a linear solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine_spec import EngineSpec, energy_differences, hamiltonians
from .qstate import (
    DensityMatrix,
    HilbertLayout,
    Operator,
    gibbs_qubit,
    partial_trace,
    tensor_all,
)

__all__ = [
    "DIAGONALITY_TOL",
    "HEAT_CROSS_CHECK_TOL",
    "CLAUSIUS_TOL",
    "CATALYST_SOLVE_TOL",
    "CatalystState",
    "CycleReport",
    "permutation_matrix",
    "build_initial_state",
    "probability_flows",
    "heat_stroke",
    "solve_catalyst",
    "run_cycle",
    "clausius_check",
]

#: Max allowed off-diagonal magnitude when reading populations as flows.
DIAGONALITY_TOL = 1e-12

#: Agreement required between operator-trace heats and d_eps . delta_p.
HEAT_CROSS_CHECK_TOL = 1e-12

#: Slack on the second-law margin before it counts as a violation.
CLAUSIUS_TOL = 1e-12

#: Residual ceiling for the catalyst linear solve and its post-checks.
CATALYST_SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class CatalystState:
    """Diagonal catalyst state, stored as a population vector."""

    populations: tuple[float, ...]

    def __post_init__(self) -> None:
        pops = tuple(float(p) for p in self.populations)
        object.__setattr__(self, "populations", pops)
        if not pops:
            raise ValueError("catalyst needs at least one level")
        if any(not math.isfinite(p) or p < -1e-12 for p in pops):
            raise ValueError(f"catalyst populations must be nonnegative, got {pops}")
        if abs(sum(pops) - 1.0) > 1e-10:
            raise ValueError(f"catalyst populations sum to {sum(pops)}, expected 1")

    @property
    def dim(self) -> int:
        return len(self.populations)

    def as_operator(self) -> Operator:
        return Operator(
            HilbertLayout((self.dim,)),
            np.diag(np.clip(np.asarray(self.populations, dtype=float), 0.0, None)).astype(
                complex
            ),
        )


@dataclass(frozen=True)
class CycleReport:
    """Everything measurable about one two-stroke cycle.

    ``efficiency`` is ``None`` when no heat is drawn from the hot bath
    (the ratio W/Q_h is then undefined).  ``regime`` is ``"engine"``
    when W > 0 and Q_h > 0, else ``"non_engine"``.
    """

    delta_p: tuple[float, ...]
    q_hot: float
    q_cold: float
    work: float
    efficiency: float | None
    clausius_margin: float
    catalyst_residual: float
    regime: str


def permutation_matrix(spec: EngineSpec) -> Operator:
    """The work-stroke unitary: transposition of each swap pair.

    Raises ``ValueError`` if swap pairs overlap or leave the space, since
    the composition would then not be the intended product of disjoint
    transpositions.
    """
    dim = spec.dim
    perm = np.arange(dim)
    touched: set[int] = set()
    for i, pair in enumerate(spec.swaps):
        for idx in (pair.u, pair.d):
            if not 0 <= idx < dim:
                raise ValueError(f"swap {i}: index {idx} out of range for dimension {dim}")
            if idx in touched:
                raise ValueError(f"swap {i}: index {idx} appears in more than one pair")
            touched.add(idx)
        perm[pair.u], perm[pair.d] = perm[pair.d], perm[pair.u]
    mat = np.zeros((dim, dim), dtype=complex)
    mat[perm, np.arange(dim)] = 1.0
    return Operator(spec.layout, mat)


def build_initial_state(spec: EngineSpec, catalyst: CatalystState) -> DensityMatrix:
    """Cycle-start state sigma_s (x) tau_h (x) tau_c with Gibbs bath qubits."""
    if catalyst.dim != spec.catalyst_dim:
        raise ValueError(
            f"catalyst has {catalyst.dim} levels but spec declares {spec.catalyst_dim}"
        )
    tau_h = gibbs_qubit(spec.hot.beta, spec.hot.omega)
    tau_c = gibbs_qubit(spec.cold.beta, spec.cold.omega)
    full = tensor_all([catalyst.as_operator(), tau_h.op, tau_c.op])
    return DensityMatrix(full)


def probability_flows(spec: EngineSpec, rho: DensityMatrix) -> np.ndarray:
    """Per-pair population transfers delta_p_i = p(u_i) - p(d_i).

    Only meaningful for diagonal states, so any off-diagonal weight above
    ``DIAGONALITY_TOL`` raises.
    """
    if rho.layout.factor_dims != spec.layout.factor_dims:
        raise ValueError(
            f"state layout {rho.layout.factor_dims} does not match "
            f"spec layout {spec.layout.factor_dims}"
        )
    mat = rho.matrix
    off = float(np.max(np.abs(mat - np.diag(mat.diagonal()))))
    if off > DIAGONALITY_TOL:
        raise ValueError(
            f"state has off-diagonal weight {off:.3e}; population flows are "
            "only defined for diagonal states"
        )
    pops = rho.populations()
    return np.array([pops[pair.u] - pops[pair.d] for pair in spec.swaps])


def heat_stroke(spec: EngineSpec, rho: DensityMatrix) -> DensityMatrix:
    """Rethermalize the bath qubits, keeping the catalyst marginal.

    Implements the partial trace over hot and cold followed by tensoring
    fresh Gibbs states back in.
    """
    sigma = partial_trace(rho, keep=(0,))
    tau_h = gibbs_qubit(spec.hot.beta, spec.hot.omega)
    tau_c = gibbs_qubit(spec.cold.beta, spec.cold.omega)
    return DensityMatrix(tensor_all([sigma.op, tau_h.op, tau_c.op]))


def _gibbs_weights(a: float) -> tuple[float, float]:
    """Qubit Gibbs populations (ground, excited) for ratio a = exp(-beta*omega)."""
    return 1.0 / (1.0 + a), a / (1.0 + a)


def solve_catalyst(spec: EngineSpec) -> CatalystState:
    """Diagonal catalyst populations making the permutation simple.

    Solves the linear system over catalyst populations q that (i) makes
    every pair flow equal, delta_p_1 = ... = delta_p_n, (ii) balances the
    net population flow through each catalyst level, and (iii) normalizes
    sum(q) = 1.  A least-squares solve is used so that redundant rows are
    harmless; if the system is inconsistent, the solution has negative
    populations, or the work stroke still fails to restore the catalyst
    marginal, ``ValueError`` is raised: no simple-permutation catalyst
    exists for this spec.

    For degenerate systems the minimum-norm solution is returned.
    """
    d_s = spec.catalyst_dim
    layout = spec.layout
    w_h = _gibbs_weights(spec.hot.gibbs_factor)
    w_c = _gibbs_weights(spec.cold.gibbs_factor)

    # delta_p_i = row_i . q with row built from the bath Gibbs weights.
    n_pairs = len(spec.swaps)
    flow_rows = np.zeros((n_pairs, d_s))
    u_levels = np.zeros(n_pairs, dtype=int)
    d_levels = np.zeros(n_pairs, dtype=int)
    for i, pair in enumerate(spec.swaps):
        s_u, h_u, c_u = layout.factor_indices(pair.u)
        s_d, h_d, c_d = layout.factor_indices(pair.d)
        flow_rows[i, s_u] += w_h[h_u] * w_c[c_u]
        flow_rows[i, s_d] -= w_h[h_d] * w_c[c_d]
        u_levels[i], d_levels[i] = s_u, s_d

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    # (i) equal flows across consecutive pairs.
    for i in range(n_pairs - 1):
        rows.append(flow_rows[i] - flow_rows[i + 1])
        rhs.append(0.0)
    # (ii) zero net flow through each catalyst level.
    for s in range(d_s):
        row = np.zeros(d_s)
        for i in range(n_pairs):
            if d_levels[i] == s:
                row += flow_rows[i]
            if u_levels[i] == s:
                row -= flow_rows[i]
        rows.append(row)
        rhs.append(0.0)
    # (iii) normalization.
    rows.append(np.ones(d_s))
    rhs.append(1.0)

    a_mat = np.vstack(rows)
    b_vec = np.asarray(rhs)
    q, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
    residual = float(np.max(np.abs(a_mat @ q - b_vec)))
    if residual > CATALYST_SOLVE_TOL:
        raise ValueError(
            "no simple-permutation catalyst exists for this spec "
            f"(linear system residual {residual:.3e})"
        )
    if float(q.min()) < -CATALYST_SOLVE_TOL:
        raise ValueError(
            "no simple-permutation catalyst exists for this spec "
            f"(solution has negative population {q.min():.3e})"
        )
    catalyst = CatalystState(tuple(np.clip(q, 0.0, None) / np.sum(np.clip(q, 0.0, None))))

    # Post-check on the actual cycle: equal flows and a restored marginal.
    rho0 = build_initial_state(spec, catalyst)
    flows = probability_flows(spec, rho0)
    if n_pairs > 1 and float(np.max(np.abs(flows - flows[0]))) > CATALYST_SOLVE_TOL:
        raise ValueError("catalyst solve left unequal pair flows; spec is inconsistent")
    s_op = permutation_matrix(spec)
    rho1 = DensityMatrix(Operator(layout, s_op.entries @ rho0.matrix @ s_op.entries.conj().T))
    before = partial_trace(rho0, keep=(0,)).matrix
    after = partial_trace(rho1, keep=(0,)).matrix
    if float(np.max(np.abs(after - before))) > CATALYST_SOLVE_TOL:
        raise ValueError("catalyst solve failed to restore the catalyst marginal")
    return catalyst


def run_cycle(spec: EngineSpec, catalyst: CatalystState | None = None) -> CycleReport:
    """Execute one two-stroke cycle and account for its energy flows.

    When ``catalyst`` is omitted it is the trivial single-level state for
    catalyst-free specs and the :func:`solve_catalyst` solution otherwise.
    """
    if catalyst is None:
        catalyst = (
            CatalystState((1.0,)) if spec.catalyst_dim == 1 else solve_catalyst(spec)
        )
    rho0 = build_initial_state(spec, catalyst)
    flows = probability_flows(spec, rho0)

    s_op = permutation_matrix(spec).entries
    rho1 = DensityMatrix(Operator(spec.layout, s_op @ rho0.matrix @ s_op.conj().T))

    # Ground truth: operator traces of the bare Hamiltonians.
    h0h, h0c = hamiltonians(spec)
    diff = rho0.matrix - rho1.matrix
    q_hot = float(np.trace(h0h.entries @ diff).real)
    q_cold = float(np.trace(h0c.entries @ diff).real)

    # Cross-check against the pairwise energy-difference form.
    q_hot_pairs = 0.0
    q_cold_pairs = 0.0
    for i in range(len(spec.swaps)):
        en = energy_differences(spec, i)
        q_hot_pairs += en.d_eps_h * flows[i]
        q_cold_pairs += en.d_eps_c * flows[i]
    for label, trace_val, pair_val in (
        ("hot", q_hot, q_hot_pairs),
        ("cold", q_cold, q_cold_pairs),
    ):
        scale = max(1.0, abs(trace_val))
        if abs(trace_val - pair_val) > HEAT_CROSS_CHECK_TOL * scale:
            raise AssertionError(
                f"{label} heat mismatch: operator trace {trace_val!r} vs "
                f"pairwise form {pair_val!r}"
            )

    work = q_hot + q_cold
    efficiency = None if q_hot == 0.0 else work / q_hot
    regime = "engine" if (work > 0.0 and q_hot > 0.0) else "non_engine"

    before = partial_trace(rho0, keep=(0,)).matrix
    after = partial_trace(rho1, keep=(0,)).matrix
    catalyst_residual = float(np.max(np.abs(after - before)))

    margin = clausius_check(spec, q_hot, q_cold)
    return CycleReport(
        delta_p=tuple(float(x) for x in flows),
        q_hot=q_hot,
        q_cold=q_cold,
        work=work,
        efficiency=efficiency,
        clausius_margin=margin,
        catalyst_residual=catalyst_residual,
        regime=regime,
    )


def clausius_check(
    spec: EngineSpec, q_hot: float, q_cold: float, tol: float = CLAUSIUS_TOL
) -> float:
    """Second-law margin -(beta_h Q_h + beta_c Q_c); raises if negative.

    The margin equals the entropy dumped into the baths per cycle and
    must be nonnegative for any stroke built from a unitary plus
    rethermalization; a violation beyond ``tol`` indicates a bug, not
    physics, hence ``AssertionError``.
    """
    margin = -(spec.hot.beta * q_hot + spec.cold.beta * q_cold)
    if margin < -tol:
        raise AssertionError(f"second-law margin is negative: {margin:.3e}")
    return margin

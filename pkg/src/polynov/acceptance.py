"""Acceptance checks shared by the `demo` subcommand and the test suite.

Every criterion is deterministic and exact (no float tolerances). Each
check returns (ok, detail) so the CLI can print one line per criterion
and the tests can assert on exactly the same computation.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from . import corpus
from .complexes import scale_check
from .homology import (
    euler_characteristic,
    main_theorem_check,
    novikov_betti,
    ordinary_betti,
    polytope_betti,
    rational_approximation,
    truncated_homology_oracle,
)
from .lattice import (
    CohomologyClass,
    Polytope,
    convex_combination,
    kernel_lattice,
    period_eval,
    polytope_min_period,
    zero_class,
)
from .morse import morse_reduce
from .twist import tensor_base_change, twisted_complex, zero_vertex_extend

# the point is exercised separately; these five carry the real geometry
SURFACES = ("circle", "circle_subdivided", "torus", "klein_bottle", "genus2")

IDENTITY4 = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))

SAMPLE_POLYTOPES = {
    "circle": ((("1",),), (("1",), ("2",))),
    "circle_subdivided": ((("1",),), (("1",), ("-1/2",))),
    "torus": (((1, 0), (0, 1)), ((1, 1),), ((1, 0), (0, 1), (1, 1))),
    "klein_bottle": (((1,),), ((1,), ("3/2",))),
    "genus2": (IDENTITY4, ((1, 1, 1, 1),), ((1, 0, 0, 0), (0, 1, 1, 1))),
}

VANISHING_CASES = (
    ("circle", ("1",)),
    ("circle", ("-2",)),
    ("circle", ("3/7",)),
    ("torus", ("1", "0")),
    ("torus", ("0", "1")),
    ("torus", ("1", "1")),
    ("torus", ("2", "3")),
    ("klein_bottle", ("1",)),
)

ORACLE_CASES = VANISHING_CASES + (
    ("circle_subdivided", ("1",)),
    ("genus2", ("1", "1", "1", "1")),
    ("genus2", ("1", "0", "0", "0")),
)


def _nonzero_classes(rank, rng, count):
    if rank == 0:
        return []
    out = []
    while len(out) < count:
        periods = tuple(
            Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3)))
            for _ in range(rank)
        )
        if any(periods):
            out.append(CohomologyClass(periods))
    return out


def _convex_weights(rng, count):
    raw = [rng.randint(1, 5) for _ in range(count)]
    total = sum(raw)
    return [Fraction(n, total) for n in raw]


def _check_boundary_square():
    reduced = 0
    for name in SURFACES:
        X = corpus.load(name)
        X.validate()
        for seed in range(20):
            R, _ = morse_reduce(X, seed=seed)
            R.validate()
            reduced += 1
    return True, (
        f"{len(SURFACES)} complexes and {reduced} Morse reductions "
        "(20 seeds each), boundary square zero throughout"
    )


def _check_ordinary_recovery():
    want = {"circle": (1, 1), "point": (1,), "torus": (1, 2, 1)}
    bad = []
    for name in sorted(want):
        got = ordinary_betti(corpus.load(name)).betti
        if got != want[name]:
            bad.append(f"{name}: got {got}, want {want[name]}")
    if bad:
        return False, "; ".join(bad)
    return True, "zero class recovers (1,1) / (1,2,1) / (1,) on circle, torus, point"


def _check_novikov_vanishing():
    bad = []
    for name, periods in VANISHING_CASES:
        X = corpus.load(name)
        a = CohomologyClass(periods)
        rep = novikov_betti(X, a)
        if any(rep.betti):
            bad.append(f"{name} {periods}: betti {rep.betti} not zero")
            continue
        oracle = truncated_homology_oracle(X, a, order=16)
        if oracle.betti != rep.betti:
            bad.append(f"{name} {periods}: oracle {oracle.betti} vs {rep.betti}")
    if bad:
        return False, "; ".join(bad)
    return True, (
        f"{len(VANISHING_CASES)} nonzero classes all vanish, "
        "each cross-checked by the order-16 oracle"
    )


def _check_euler_invariance():
    rng = random.Random(4)
    bad = []
    pairs = 0
    for name in corpus.names():
        X = corpus.load(name)
        chi = euler_characteristic(X)
        classes = [zero_class(X.deck.rank)]
        classes += _nonzero_classes(X.deck.rank, rng, 3)
        for a in classes:
            rep = novikov_betti(X, a)
            alternating = sum((-1) ** i * b for i, b in enumerate(rep.betti))
            pairs += 1
            if alternating != chi or rep.chi != chi:
                bad.append(f"{name} {a.to_json()}: {alternating} vs chi {chi}")
    if bad:
        return False, "; ".join(bad)
    return True, f"alternating Betti sum equals chi on {pairs} (complex, class) pairs"


def _check_vertex_reduction():
    rng = random.Random(5)
    bad = []
    positive_hits = 0
    total = 120
    for trial in range(total):
        rank = rng.randint(1, 4)
        nverts = rng.randint(1, 4)
        if trial % 3 == 0:
            # designed positive case so the premise is exercised often
            verts = [
                tuple(Fraction(rng.randint(1, 4)) for _ in range(rank))
                for _ in range(nverts)
            ]
            support = [
                tuple(rng.randint(1, 4) for _ in range(rank))
                for _ in range(rng.randint(1, 5))
            ]
        else:
            verts = [
                tuple(
                    Fraction(rng.randint(-3, 5), rng.randint(1, 3))
                    for _ in range(rank)
                )
                for _ in range(nverts)
            ]
            support = [
                tuple(rng.randint(-4, 4) for _ in range(rank))
                for _ in range(rng.randint(1, 5))
            ]
        P = Polytope(verts)
        raw = [rng.randint(0, 6) for _ in range(len(P.vertices))]
        if not any(raw):
            raw[rng.randrange(len(raw))] = 1
        weights = [Fraction(n, sum(raw)) for n in raw]
        c = convex_combination(P, weights)
        for A in support:
            if period_eval(c, A) < polytope_min_period(P, A):
                bad.append(f"trial {trial}: vertex minimum is not a lower bound")
        if all(period_eval(v, A) > 0 for v in P.vertices for A in support):
            positive_hits += 1
            if not all(period_eval(c, A) > 0 for A in support):
                bad.append(f"trial {trial}: positivity lost at the combination")
    if bad:
        return False, "; ".join(bad[:4])
    return True, (
        f"{total} random (support, polytope, weights) triples; "
        f"positivity premise held in {positive_hits} and was always inherited"
    )


def _check_ray_invariance():
    bad = []
    cases = 0
    for name in SURFACES:
        X = corpus.load(name)
        for verts in SAMPLE_POLYTOPES[name]:
            P = Polytope(verts)
            for r in (Fraction(1, 2), 3):
                cases += 1
                if not scale_check(X, P, r):
                    bad.append(f"{name}: twisted complex differs at r={r}")
                before = polytope_betti(X, P).canonical()
                after = polytope_betti(X, P.scale(r)).canonical()
                if before != after:
                    bad.append(f"{name}: report bytes differ at r={r}")
    if bad:
        return False, "; ".join(bad)
    return True, f"{cases} scalings (r=1/2, r=3) left complexes and report bytes fixed"


def _check_twist_equals_tensor():
    rng = random.Random(7)
    bad = []
    cases = 0
    for name in SURFACES:
        X = corpus.load(name)
        rank = X.deck.rank
        polys = [Polytope(v) for v in SAMPLE_POLYTOPES[name]]
        for _ in range(2):
            polys.append(
                Polytope(
                    [
                        tuple(
                            Fraction(rng.randint(-2, 3), rng.randint(1, 2))
                            for _ in range(rank)
                        )
                        for _ in range(rng.randint(1, 3))
                    ]
                )
            )
        for P in polys:
            restricts = [None]
            if len(P.vertices) > 1:
                restricts.append((0,))
            for B in restricts:
                cases += 1
                if twisted_complex(X, P, B) != tensor_base_change(X, P, B):
                    bad.append(f"{name}: routes disagree on {P.to_json()}")
    if bad:
        return False, "; ".join(bad)
    return True, f"twist and base-change routes agree entrywise on {cases} cases"


def _check_zero_vertex_trick():
    bad = []
    cases = 0
    for name in SURFACES:
        X = corpus.load(name)
        for verts in SAMPLE_POLYTOPES[name]:
            P = Polytope(verts)
            extended, _ = zero_vertex_extend(P)
            keep = tuple(range(len(P.vertices)))
            cases += 1
            if kernel_lattice(P.vertices) != kernel_lattice(extended.vertices):
                bad.append(f"{name}: kernel lattice moved")
            if twisted_complex(X, P).base != twisted_complex(X, extended, keep).base:
                bad.append(f"{name}: twisted complex moved")
            before = polytope_betti(X, P).canonical()
            after = polytope_betti(X, extended, keep).canonical()
            if before != after:
                bad.append(f"{name}: report bytes moved")
    if bad:
        return False, "; ".join(bad)
    return True, f"adding the zero vertex fixed kernels and report bytes in {cases} cases"


def _check_novikov_principle():
    rng = random.Random(9)
    bad = []
    checked = 0
    for name in SURFACES:
        X = corpus.load(name)
        classes = [zero_class(X.deck.rank)]
        classes += _nonzero_classes(X.deck.rank, rng, 2)
        for seed in range(20):
            R, _ = morse_reduce(X, seed=seed)
            for a in classes:
                checked += 1
                if novikov_betti(R, a).betti != novikov_betti(X, a).betti:
                    bad.append(f"{name} seed {seed} class {a.to_json()}")
    if bad:
        return False, "Betti moved under reduction: " + "; ".join(bad[:4])
    return True, (
        f"{checked} (complex, seed, class) checks: reduced and cellular Betti agree"
    )


def _check_main_theorem_square():
    rng = random.Random(10)
    bad = []
    samples = 0
    targets = (("torus", ((1, 0), (0, 1), (1, 1))), ("genus2", IDENTITY4))
    for name, verts in targets:
        X = corpus.load(name)
        P = Polytope(verts)
        n = len(P.vertices)
        for k in range(5):
            wa = _convex_weights(rng, n)
            wb = _convex_weights(rng, n)
            B = None
            if k % 2 == 1:
                B = tuple(sorted(rng.sample(range(n), rng.randint(1, n))))
            samples += 1
            out = main_theorem_check(X, P, wa, wb, B=B, seed=k)
            if not out["ok"]:
                failing = sorted(k for k, v in out["checks"].items() if not v)
                bad.append(f"{name} sample {k}: {failing}")
    if bad:
        return False, "; ".join(bad)
    return True, f"{samples} (a, b, restriction) samples pass the full square of checks"


def _check_rational_approximation():
    rng = random.Random(11)
    bad = []
    families = 0
    for _ in range(20):
        rank = rng.randint(1, 4)
        periods = tuple(
            Fraction(0)
            if rng.random() < 0.25
            else Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            for _ in range(rank)
        )
        u = CohomologyClass(periods)
        for eps in (Fraction(1, 10), Fraction(1, 100)):
            family = rational_approximation(u, eps)
            families += 1
            for flag, value in family.flags.items():
                if not value:
                    bad.append(f"{u.to_json()} eps {eps}: {flag} failed")
    if bad:
        return False, "; ".join(bad[:4])
    return True, (
        f"{families} families (20 targets, eps 1/10 and 1/100): "
        "distinct, close, kernel-compatible, spanning"
    )


def _check_oracle_consistency():
    bad = []
    orders = []
    for name, periods in ORACLE_CASES:
        X = corpus.load(name)
        a = CohomologyClass(periods)
        oracle = truncated_homology_oracle(X, a)
        exact = novikov_betti(X, a)
        if not oracle.checks["stabilized"]:
            bad.append(f"{name} {periods}: oracle never stabilized")
            continue
        if oracle.betti != exact.betti:
            bad.append(f"{name} {periods}: {oracle.betti} vs exact {exact.betti}")
        orders.append(max(oracle.checks["orders"]))
    worst = max(orders) if orders else 0
    if worst > 32:
        bad.append(f"stabilization needed order {worst} > 32")
    if bad:
        return False, "; ".join(bad)
    return True, (
        f"oracle matches exact Betti on {len(ORACLE_CASES)} rank-one cases, "
        f"stabilization order at most {worst}"
    )


@dataclass(frozen=True)
class Criterion:
    ident: str
    title: str
    run: object


CRITERIA = (
    Criterion(
        "boundary-square",
        "boundary operators square to zero on the corpus and all reductions",
        _check_boundary_square,
    ),
    Criterion(
        "ordinary-recovery",
        "the zero class recovers ordinary Betti numbers",
        _check_ordinary_recovery,
    ),
    Criterion(
        "novikov-vanishing",
        "nonzero classes kill the homology of the sample surfaces",
        _check_novikov_vanishing,
    ),
    Criterion(
        "euler-invariance",
        "alternating Betti sums equal the Euler characteristic",
        _check_euler_invariance,
    ),
    Criterion(
        "vertex-reduction",
        "positivity and minimal periods are decided at polytope vertices",
        _check_vertex_reduction,
    ),
    Criterion(
        "ray-invariance",
        "rescaling a polytope changes no complex and no report byte",
        _check_ray_invariance,
    ),
    Criterion(
        "twist-equals-tensor",
        "the twisted complex equals the base-change route entrywise",
        _check_twist_equals_tensor,
    ),
    Criterion(
        "zero-vertex-trick",
        "adding the zero vertex preserves kernels and reports",
        _check_zero_vertex_trick,
    ),
    Criterion(
        "novikov-principle",
        "Morse-reduced complexes compute the same Betti numbers",
        _check_novikov_principle,
    ),
    Criterion(
        "main-theorem-square",
        "both routes and both sample classes give one answer",
        _check_main_theorem_square,
    ),
    Criterion(
        "rational-approximation",
        "approximation families are distinct, close, kernel-compatible, spanning",
        _check_rational_approximation,
    ),
    Criterion(
        "oracle-consistency",
        "the truncated oracle stabilizes and matches the exact ranks",
        _check_oracle_consistency,
    ),
)


def run_criterion(criterion) -> tuple:
    """(ok, detail) for one criterion; exceptions become failures."""
    try:
        return criterion.run()
    except Exception as exc:
        return False, f"raised {exc!r}"


def run_all():
    """List of (criterion, ok, detail) over all acceptance criteria."""
    return [(c, *run_criterion(c)) for c in CRITERIA]

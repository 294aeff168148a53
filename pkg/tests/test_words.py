"""Word machinery: freeness scans, shortest identity words, subgroup
generators, recipe replays."""

import pytest

from girthlab import cayley, modmat
from girthlab.cayley import DegenerateSpecError
from girthlab.exactmat import ExactMatrix, ParameterError, Word, magic_pair, power_closed_form
from girthlab.params import validate
from girthlab.words import (
    eval_word_mod,
    freeness_scan,
    identity_word_length_mod_p,
    replay_recipe_qt,
    replay_recipe_sl3_mod3,
    schreier_generators,
)

INV = {0: 1, 1: 0, 2: 3, 3: 2}


def brute_reduced_words(max_length):
    """Every reduced word over the four letters, grouped by length."""
    by_len = {1: [(lt,) for lt in range(4)]}
    for L in range(2, max_length + 1):
        by_len[L] = [
            w + (lt,) for w in by_len[L - 1] for lt in range(4) if lt != INV[w[-1]]
        ]
    return by_len


def brute_canonical_count(max_length):
    """Independent count of rotation/inversion classes of cyclically reduced
    words, by explicit orbit enumeration."""
    seen = set()
    classes = 0
    for L, wordlist in brute_reduced_words(max_length).items():
        for w in wordlist:
            if L > 1 and w[0] == INV[w[-1]]:
                continue
            if w in seen:
                continue
            classes += 1
            inv = tuple(INV[lt] for lt in reversed(w))
            for base in (w, inv):
                doubled = base + base
                for s in range(L):
                    seen.add(doubled[s : s + L])
    return classes


def brute_min_relation_length(n, l, a, b, max_length):
    """Smallest length of a reduced word evaluating to the identity over Z."""
    A, B = magic_pair(n, a, b, allow_small=True)
    X = power_closed_form(A, l)
    gens = [X, X.inverse(), power_closed_form(B, l), power_closed_form(B, l).inverse()]
    ident = ExactMatrix.identity(n)
    for L, wordlist in brute_reduced_words(max_length).items():
        for w in wordlist:
            prod = ident
            for lt in w:
                prod = prod @ gens[lt]
            if prod.is_identity():
                return L
    return None


def test_words_checked_matches_class_count():
    report = freeness_scan(2, 1, 2, 2, 7)
    assert report.words_checked == brute_canonical_count(7)
    assert not report.partial


def test_freeness_scan_finds_the_torsion_relation():
    report = freeness_scan(2, 1, 1, 1, 12)
    assert report.violations
    shortest = min(w.length for w in report.violations)
    assert shortest == brute_min_relation_length(2, 1, 1, 1, 6) == 6
    # every reported violation really evaluates to the identity
    A, B = magic_pair(2, 1, 1, allow_small=True)
    from girthlab.exactmat import eval_word

    for w in report.violations[:10]:
        assert eval_word(w, A, B).is_identity()


def test_freeness_scan_clean_cases():
    assert freeness_scan(2, 1, 2, 2, 10).violations == ()
    assert freeness_scan(3, 4, 4, 2, 8).violations == ()


def test_freeness_scan_transpose_symmetry():
    r1 = freeness_scan(2, 1, 1, 2, 10)
    r2 = freeness_scan(2, 1, 2, 1, 10)
    assert len(r1.violations) == len(r2.violations)
    assert r1.words_checked == r2.words_checked


def test_freeness_scan_budget_partial():
    report = freeness_scan(2, 1, 2, 2, 10, budget=100)
    assert report.partial
    assert report.words_checked == 100


def test_freeness_scan_threads_agree():
    seq = freeness_scan(2, 1, 1, 1, 9, threads=1)
    par = freeness_scan(2, 1, 1, 1, 9, threads=4)
    assert seq.violations == par.violations
    assert seq.words_checked == par.words_checked


def test_freeness_scan_rejects_short_bound():
    with pytest.raises(ParameterError):
        freeness_scan(2, 1, 2, 2, 1)


def test_identity_word_length_examples():
    spec = validate(2, 1, 2, 2)
    assert identity_word_length_mod_p(spec, 3, 6) == 3
    assert identity_word_length_mod_p(spec, 1009, 8) is None
    with pytest.raises(DegenerateSpecError):
        identity_word_length_mod_p(spec, 2, 6)


def test_identity_word_length_matches_girth_small_primes():
    spec = validate(2, 1, 2, 2)
    for p in (3, 5, 7):
        X, Y = cayley.spec_generators(spec, p)
        assert identity_word_length_mod_p(spec, p, 8) == cayley.girth([X, Y])


def test_identity_word_length_matches_girth_dimension_three():
    spec = validate(3, 4, 4, 2)
    for p in (3, 5):
        X, Y = cayley.spec_generators(spec, p)
        g = cayley.girth([X, Y])
        assert identity_word_length_mod_p(spec, p, g) == g


def test_schreier_generators_small_indices():
    g1 = schreier_generators(1)
    assert g1.rank == 2
    assert {str(w) for w in g1.generators} == {"X", "Y"}
    g2 = schreier_generators(2)
    assert g2.rank == 3
    assert {str(w) for w in g2.generators} == {"Y", "X^2", "X Y X^-1"}
    assert schreier_generators(3).rank == 4
    with pytest.raises(ParameterError):
        schreier_generators(0)


def test_schreier_generators_lie_in_kernel():
    # the subgroup is the kernel of X -> 1, Y -> 0 into Z/mZ: every
    # generator word must act trivially on the coset space
    for m in range(1, 7):
        gens = schreier_generators(m)
        assert gens.rank == m + 1 == len(gens.generators)
        for w in gens.generators:
            shift = sum(exp for letter, exp in w.syllables if letter == "X")
            assert shift % m == 0


def test_schreier_coset_action_connected():
    # the X-edges alone connect all m cosets, certifying the index
    for m in range(1, 7):
        reachable = {0}
        for _ in range(m):
            reachable |= {(i + 1) % m for i in reachable}
        assert len(reachable) == m


def test_schreier_images_generate_free_subgroup():
    # map the index-2 generators into the ambient pair and scan every
    # reduced word in the three-letter subgroup alphabet up to length 8
    gens = schreier_generators(2)
    A, B = magic_pair(2, 2, 2)
    from girthlab.exactmat import eval_word

    images = [eval_word(w, A, B) for w in gens.generators]
    mats = []
    for M in images:
        mats.append(M.entries)
        mats.append(M.inverse().entries)
    ident = ExactMatrix.identity(2).entries

    def mul(a, b):
        return (
            (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
        )

    # iterative DFS over the 6-letter reduced words, inverse pairing idx^1
    checked = 0
    stack = [(lt, mul(ident, mats[lt]), 1) for lt in range(5, -1, -1)]
    while stack:
        lt, prod, depth = stack.pop()
        assert prod != ident
        checked += 1
        if depth < 8:
            for nxt in range(5, -1, -1):
                if nxt != lt ^ 1:
                    stack.append((nxt, mul(prod, mats[nxt]), depth + 1))
    assert checked == sum(6 * 5 ** (L - 1) for L in range(1, 9))


def test_sl3_recipe_step_matrices():
    replay = replay_recipe_sl3_mod3(4, 2)
    by_label = {s.label: s.matrix.entries for s in replay.steps}
    assert by_label["C1"] == ((2, 2, 1), (0, 1, 0), (2, 0, 0))
    assert by_label["(C1*C2^-1*X)^2"] == ((1, 0, 1), (0, 1, 0), (0, 0, 1))
    assert replay.closure_order == 5616 == replay.expected_order
    assert not replay.closure_partial


def test_sl3_recipe_is_class_independent():
    r1 = replay_recipe_sl3_mod3(4, 2)
    r2 = replay_recipe_sl3_mod3(7, 5)
    for s1, s2 in zip(r1.steps, r2.steps):
        assert s1.matrix.entries == s2.matrix.entries


def test_sl3_recipe_rejects_wrong_congruence():
    with pytest.raises(ParameterError):
        replay_recipe_sl3_mod3(5, 2)
    with pytest.raises(ParameterError):
        replay_recipe_sl3_mod3(4, 4)


def test_qt_recipe_31_steps():
    replay = replay_recipe_qt(3, 1, memory_budget=1 << 22)
    by_label = {s.label: s.matrix.entries for s in replay.steps}
    corner = by_label["B^3"]
    assert corner[3][0] == 1
    assert sum(x != 0 for row in corner for x in row) == 5
    x1 = by_label["X1=A*X^-1"]
    assert x1[2][3] == 1
    assert sum(x != 0 for row in x1 for x in row) == 5
    # small budget: closure deferred, step checks stand
    assert replay.closure_partial and replay.closure_order is None


def test_qt_recipe_51_steps_without_closure():
    # SL_6(F_5) is far beyond desk scale; the step checks still replay
    replay = replay_recipe_qt(5, 1, memory_budget=1 << 20)
    assert len(replay.steps) == 11
    assert replay.closure_partial


def test_qt_recipe_rejects_bad_shape():
    with pytest.raises(ParameterError):
        replay_recipe_qt(2, 1)  # n = 3 has no such block recipe
    with pytest.raises(ParameterError):
        replay_recipe_qt(4, 1)
    with pytest.raises(ParameterError):
        replay_recipe_qt(3, 0)


def test_eval_word_mod_matches_exact_reduction():
    A, B = magic_pair(3, 4, 2)
    X, Y = power_closed_form(A, 4), power_closed_form(B, 4)
    w = Word.of([("X", 2), ("Y", -3), ("X", 1)])
    from girthlab.exactmat import eval_word

    exact = modmat.reduce(eval_word(w, X, Y), 11)
    modded = eval_word_mod(w, modmat.reduce(X, 11), modmat.reduce(Y, 11))
    assert exact.entries == modded.entries


def test_report_json_roundtrip():
    report = freeness_scan(2, 1, 1, 1, 6)
    data = report.to_json()
    assert data["violations"] and data["words_checked"] > 0
    replay = replay_recipe_sl3_mod3(4, 2)
    data = replay.to_json()
    assert len(data["steps"]) == 12 and data["closure_order"] == 5616


def test_freeness_scan_budget_deterministic_across_threads():
    # the word budget is consumed in job-list order, so truncation results
    # cannot depend on thread scheduling
    reports = [
        freeness_scan(2, 1, 1, 1, 10, budget=500, threads=t) for t in (1, 2, 8)
    ]
    first = reports[0]
    assert first.partial and first.words_checked == 500
    for rep in reports[1:]:
        assert rep.violations == first.violations
        assert rep.words_checked == first.words_checked
        assert rep.partial == first.partial

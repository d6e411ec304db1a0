import json

import pytest

from shadiv.datasets import embedded_curve, regular_prime_resolutions
from shadiv.divisibility import (
    HEURISTIC,
    RIGOROUS,
    Outcome,
    RunConfig,
    fundamental_discriminants,
    twist_scan,
    unipotent_lift_exception,
    verdict_number_field,
    verdict_over_Q,
)
from shadiv.elliptic import curve, is_supersingular, reduction_type, trace_at
from shadiv.errors import UnsupportedPrime


def test_large_prime_rule():
    for label in ("121-B1", "121-C1", "legendre-test"):
        v = verdict_over_Q(embedded_curve(label), 13)
        assert v.outcome == Outcome.GUARANTEED
        assert v.chain[0].rule == "rational.large_prime"
        assert all(step.rigor == RIGOROUS for step in v.chain)


def test_large_prime_rule_consults_no_traces(monkeypatch):
    import shadiv.divisibility as div

    def boom(*args, **kwargs):
        raise AssertionError("trace data consulted on the large-prime path")

    monkeypatch.setattr(div, "frobenius_traces", boom)
    v = verdict_over_Q(embedded_curve("121-C2"), 13)
    assert v.outcome == Outcome.GUARANTEED


def test_regular_prime_resolution_chain():
    for label in ("121-C1", "121-C2"):
        v = verdict_over_Q(embedded_curve(label), 11)
        assert v.outcome == Outcome.GUARANTEED
        assert v.chain[-1].rule == "rational.regular_prime_resolution"
    # 121-B1 is excluded by its unique consistent pair, not by the lookup
    v = verdict_over_Q(embedded_curve("121-B1"), 11)
    assert v.outcome == Outcome.GUARANTEED
    assert [s.rule for s in v.chain] == ["rational.large_prime"]


def test_resolution_table_is_data_not_code():
    table = regular_prime_resolutions()
    assert (("121-C1", 11)) in table
    assert ((1, 1, 0, -2, -7), 11) in table


def test_legendre_route():
    v = verdict_over_Q(embedded_curve("legendre-test"), 5)
    assert v.outcome == Outcome.GUARANTEED
    assert v.chain[0].rule == "rational.full_2torsion"
    v7 = verdict_over_Q(embedded_curve("legendre-test"), 7)
    assert v7.outcome == Outcome.GUARANTEED
    assert v7.chain[0].rule == "rational.full_2torsion"


def test_supersingular_route():
    e = embedded_curve("cm-j1728")
    assert is_supersingular(e, 7)
    v = verdict_over_Q(e, 7)
    assert v.outcome == Outcome.GUARANTEED
    assert v.chain[0].rule == "rational.supersingular"


def test_nonsplit_multiplicative_route():
    # find a small curve with nonsplit multiplicative reduction at 5 and no
    # full 2-torsion, so the reduction rule is the one that fires
    from shadiv.elliptic import ReductionType, SingularCurve, has_full_rational_2torsion

    hit = None
    for a2 in range(-6, 7):
        for a6 in range(-6, 7):
            try:
                e = curve((0, a2, 0, 0, a6))
            except SingularCurve:
                continue
            if e.discriminant % 5 == 0 and e.c4 % 5:
                if reduction_type(e, 5) == ReductionType.MULTIPLICATIVE_NONSPLIT:
                    if not has_full_rational_2torsion(e):
                        hit = e
                        break
        if hit:
            break
    assert hit is not None
    v = verdict_over_Q(hit, 5)
    assert v.outcome == Outcome.GUARANTEED
    assert v.chain[0].rule == "rational.nonsplit_multiplicative"


def test_selmer_jacobian_fails_criterion_at_3_only():
    sj = embedded_curve("selmer-jacobian")
    v3 = verdict_over_Q(sj, 3)
    assert v3.outcome == Outcome.CRITERION_FAILS
    assert v3.evidence["interpretation"].startswith("criterion-level failure")
    assert any(step.rigor == HEURISTIC for step in v3.chain)
    assert verdict_over_Q(sj, 5).outcome == Outcome.GUARANTEED
    assert verdict_over_Q(sj, 7).outcome == Outcome.GUARANTEED


def test_rational_5_torsion_curve_fails_at_5():
    e = curve((0, -1, 1, 0, 0), label="11a3")
    v = verdict_over_Q(e, 5)
    assert v.outcome == Outcome.CRITERION_FAILS
    shapes = {s["shape"] for s in v.evidence["consistent_shapes"]}
    assert "1 (+) eps mod 5" in shapes


def test_verdict_rejects_p2():
    with pytest.raises(UnsupportedPrime):
        verdict_over_Q(embedded_curve("121-B1"), 2)


def test_chain_replay():
    """Re-executing every chain step reproduces the verdict."""
    for label, p in (("121-B1", 3), ("121-B1", 5), ("cm-j1728", 7), ("selmer-jacobian", 3)):
        e = embedded_curve(label)
        v = verdict_over_Q(e, p)
        for step in v.chain:
            if step.rule == "rational.shape_exclusion":
                ell = step.inputs["ell"]
                assert trace_at(e, ell) == step.inputs["observed_a_ell"]
                a, b = step.inputs["shape"], None
                pair = step.inputs["shape"]
                assert trace_at(e, ell) % p != step.inputs["expected_mod_p"]
            elif step.rule == "rational.supersingular":
                assert is_supersingular(e, p)
            elif step.rule == "rational.large_prime":
                assert p > 7
            elif step.rule == "rational.full_2torsion":
                from shadiv.elliptic import has_full_rational_2torsion

                assert has_full_rational_2torsion(e) and p >= 5


def test_json_round_trip_and_stability():
    v = verdict_over_Q(embedded_curve("121-C1"), 11)
    blob = v.to_json()
    parsed = json.loads(blob)
    assert parsed["curve"] == "121-C1"
    assert parsed["p"] == 11
    assert parsed["outcome"] == "Guaranteed"
    assert parsed["chain"][-1]["theorem"] == "rational.regular_prime_resolution"
    assert set(parsed["chain"][0]) == {"theorem", "quote_tag", "inputs", "rigor"}
    # bytewise stability
    assert blob == verdict_over_Q(embedded_curve("121-C1"), 11).to_json()
    assert blob == json.dumps(parsed, sort_keys=True, separators=(",", ":"))


def test_tsv_row():
    row = verdict_over_Q(embedded_curve("121-C1"), 13).tsv_row()
    assert row.split("\t") == ["121-C1", "13", "Guaranteed", "rational.large_prime"]


def test_large_prime_route_tags():
    routes = {
        11: "modular-curve analysis at 11",
        13: "excluded by Mazur torsion bound",
        17: "norm-3 sieve via potentially good reduction",
        19: "excluded by Mazur torsion bound",
        23: "norm-3 sieve via potentially good reduction",
    }
    e = embedded_curve("legendre-test")
    for p, route in routes.items():
        v = verdict_over_Q(e, p)
        assert v.chain[0].inputs["route"] == route


def test_user_supplied_semistability_suppresses_warning():
    e = curve((0, -9, 27, 0, 0), label="11a3-scaled")
    cfg = RunConfig(semistable_outside_p=True)
    v = verdict_over_Q(e, 5, cfg)
    assert v.outcome == Outcome.CRITERION_FAILS
    assert "semistability_warnings" not in v.evidence
    assert v.evidence["semistability"].startswith("user-supplied")


def test_semistability_warning_on_nonminimal_model():
    # 11a3 scaled by u = 3: same curve, model now looks additive at 3
    e = curve((0, -9, 27, 0, 0), label="11a3-scaled")
    assert reduction_type(e, 3).value == "Additive"
    v = verdict_over_Q(e, 5)
    assert v.outcome == Outcome.CRITERION_FAILS
    warnings = v.evidence.get("semistability_warnings", [])
    assert any("additive reduction at 3" in w for w in warnings)


def test_number_field_verdicts():
    v = verdict_number_field(1, 13)
    assert v.outcome == Outcome.GUARANTEED
    assert v.chain[0].rule == "nf.uniform_degree_bound"
    # refined path (uniform bound fails at d=2, p=29 but all three conditions hold)
    v = verdict_number_field(2, 29, good_place_norms=(2,))
    assert v.outcome == Outcome.GUARANTEED
    rules = [s.rule for s in v.chain]
    assert rules == ["nf.cyclotomic_degree", "nf.torsion_bound", "nf.norm_sieve"]
    # at p = 11 over Q no norm passes the sieve: (2 + sqrt 2)^2 > 11 already
    v = verdict_number_field(1, 11, good_place_norms=(2, 23))
    assert v.outcome == Outcome.INCONCLUSIVE
    assert "norm sieve" in " ".join(
        s.statement for s in v.chain if s.rule == "nf.refined_path"
    ) or any("Nv" in f for f in v.chain[-1].inputs["failed"])
    v = verdict_number_field(2, 7)
    assert v.outcome == Outcome.INCONCLUSIVE
    v = verdict_number_field(2, 7, good_place_norms=(2,), torsion_bound_supplied=True)
    rules = {s.rule: s.rigor for s in v.chain}
    assert rules.get("nf.torsion_bound") == "user-supplied"


def test_number_field_norm_sieve_excludes_3p():
    # norms divisible by 3 or p are not admissible witnesses
    v = verdict_number_field(1, 23, good_place_norms=(3, 23, 2))
    # uniform bound (2 + sqrt2)^2 < 23 already fires
    assert v.chain[0].rule == "nf.uniform_degree_bound"
    v = verdict_number_field(2, 19, good_place_norms=(3,))
    failed = v.chain[-1].inputs.get("failed", [])
    assert any("Nv" in f for f in failed)


def test_unipotent_lift_exception():
    assert unipotent_lift_exception(3) is True
    assert unipotent_lift_exception(5) is False
    assert unipotent_lift_exception(7) is False
    with pytest.raises(ValueError):
        unipotent_lift_exception(2)


def test_fundamental_discriminants():
    ds = fundamental_discriminants(20)
    assert 1 in ds and -3 in ds and -4 in ds and 5 in ds and 8 in ds and -8 in ds
    assert 2 not in ds and 3 not in ds and -2 not in ds and 9 not in ds and 12 in ds
    for d in ds:
        assert d % 4 in (0, 1)


def test_twist_by_one_equals_base_verdict():
    e = embedded_curve("selmer-jacobian")
    report = twist_scan(e, 3, 1)
    assert len(report.rows) == 1
    d, v = report.rows[0]
    assert d == 1
    base = verdict_over_Q(e, 3)
    assert v.outcome == base.outcome


def test_twist_scan_caps_small():
    e = embedded_curve("selmer-jacobian")
    report = twist_scan(e, 3, 100)
    assert report.failure_count == 2
    assert [d for d, _ in report.failures] == [1, -3]
    assert report.failure_count <= report.cap
    for p in (5, 7):
        assert twist_scan(e, p, 100).failure_count == 0


def test_twist_scan_rejects_large_p():
    with pytest.raises(ValueError):
        twist_scan(embedded_curve("121-B1"), 11, 10)

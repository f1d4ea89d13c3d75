import json

import pytest
from hypothesis import given, strategies as st

from admkahler.exactpoly import RatPoly, rational
from admkahler.setup import (
    AdmissibleSetup,
    SetupError,
    load_setup,
    loads_setup,
    momentum_weight,
    nonnegative_base,
    random_setup,
    validate,
)


def test_weight_of_bare_fibre():
    assert momentum_weight(AdmissibleSetup()) == RatPoly((1,))


def test_weight_with_blow_downs():
    assert momentum_weight(AdmissibleSetup(1, 1)) == RatPoly((1, 0, -1))


def test_weight_product_of_factors(koiso_sakane):
    assert momentum_weight(koiso_sakane) == RatPoly((1, 0, rational("-1/4")))


def test_class_parameter_range():
    errs = validate(AdmissibleSetup.of(0, 0, [(1, "3/2", -2)]))
    assert any("class parameter out of range" in e for e in errs)


def test_sphere_integrality_ok():
    assert validate(AdmissibleSetup.of(0, 0, [(1, "1/2", 2, 2, 1)])) == []


def test_fujita_bound():
    errs = validate(AdmissibleSetup.of(0, 0, [(1, "1/2", 4, 4, 1)]))
    assert any("Fujita bound p <= dim+1" in e for e in errs)


def test_integrality_consistency():
    errs = validate(AdmissibleSetup.of(0, 0, [(1, "1/2", 2, 4, 1), (1, "1/2", -2, 2, -1)]))
    assert any("s must equal p/q" in e for e in errs)
    assert any("sign of q" in e for e in errs)


def test_negative_end_dimension():
    assert validate(AdmissibleSetup(-1, 0)) != []


@pytest.mark.parametrize(
    "factors, expected",
    [([(1, "1/2", 2)], True), ([(1, "1/2", -2)], False), ([], True)],
)
def test_nonnegative_base(factors, expected):
    assert nonnegative_base(AdmissibleSetup.of(0, 0, factors)) is expected


def test_load_files(setups_dir):
    ks = load_setup(setups_dir / "koiso-sakane.toml")
    assert validate(ks) == []
    assert [f.x for f in ks.factors] == [rational("1/2"), rational("-1/2")]
    assert validate(load_setup(setups_dir / "malformed.toml")) != []


def test_unknown_key_rejected():
    with pytest.raises(SetupError):
        loads_setup('d0 = 0\ndinf = 0\n[[factors]]\ndim = 1\nx = "1/2"\ns = "1"\ng = 3\n')


def test_bad_rational_rejected():
    with pytest.raises(SetupError):
        loads_setup('[[factors]]\ndim = 1\nx = "one half"\ns = "1"\n')


@given(st.integers(0, 10**6))
def test_toml_and_json_roundtrip(seed):
    import random

    s = random_setup(random.Random(seed))
    assert validate(s) == []
    assert loads_setup(s.to_toml()) == s
    assert loads_setup(json.dumps(s.to_record()), fmt="json") == s
    assert s.mirrored().mirrored() == s


@given(st.integers(0, 10**6))
def test_mirror_reflects_weight(seed):
    import random

    s = random_setup(random.Random(seed))
    p, q = momentum_weight(s), momentum_weight(s.mirrored())
    assert q == p.compose_linear(0, -1)

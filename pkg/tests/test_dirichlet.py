import math
import struct

import mpmath as mp
import pytest

from gtmprod.dirichlet import (
    DirichletCache,
    dirichlet_direct,
    dirichlet_mp,
    dirichlet_value,
    power_moments,
    zeta_mp,
)
from gtmprod.sequences import make_sequence, parse_seq_spec


class TestPowerMoments:
    def test_examples(self):
        tm = parse_seq_spec("gtm:2:1")
        assert power_moments(tm, 0) == 0
        for i in (1, 2, 5):
            assert power_moments(tm, i) == -1
        assert power_moments(parse_seq_spec("gtm:3:001"), 0) == 1

    def test_zeroth_moment_is_delta_q(self):
        for spec in ("gtm:3:01", "dcount:5:2", "dparity:4"):
            seq = parse_seq_spec(spec)
            assert power_moments(seq, 0) == seq.delta_q

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            power_moments(parse_seq_spec("gtm:2:1"), -1)


class TestLadder:
    def test_zeta_values(self, cache):
        z2, e2 = zeta_mp(2, cache)
        z4, e4 = zeta_mp(4, cache)
        assert abs(float(z2) - math.pi**2 / 6) < 1e-10
        assert abs(float(z4) - math.pi**4 / 90) < 1e-10
        assert e2 < 1e-20 and e4 < 1e-20

    def test_alternating_closed_forms(self, cache):
        alt = parse_seq_spec("gtm:3:10")  # delta_n = (-1)^n
        f1, _ = dirichlet_mp(alt, 1, cache)
        assert abs(float(f1) + math.log(2)) < 1e-14
        f2, _ = dirichlet_mp(alt, 2, cache)
        assert abs(float(f2) + math.pi**2 / 12) < 1e-14

    def test_high_order_dominated_by_first_term(self, cache):
        tm = parse_seq_spec("gtm:2:1")
        value, eps = dirichlet_value(tm, 40, cache=cache)
        assert abs(value + 1.0) < 2.0**-39
        assert eps < 1e-12

    def test_all_plus_needs_s_at_least_2(self, cache):
        zeta_seq = make_sequence("gtm", 2, bits="0")
        with pytest.raises(ValueError):
            dirichlet_value(zeta_seq, 1, cache=cache)
        v, _ = dirichlet_value(zeta_seq, 2, cache=cache)
        assert abs(v - math.pi**2 / 6) < 1e-12

    @pytest.mark.parametrize("spec", ["gtm:2:1", "gtm:3:01", "dcount:4:3", "dparity:5"])
    def test_ladder_vs_direct(self, spec, cache):
        seq = parse_seq_spec(spec)
        for s in (1, 2, 3, 4):
            v, err = dirichlet_mp(seq, s, cache)
            dv, derr = dirichlet_direct(seq, s, 2 * 10**5)
            assert abs(float(v) - dv) <= 4 * err + derr, (spec, s)

    def test_direct_oracle_reference_at_s1(self, cache):
        # slow-but-independent reference at N = 10^7 agrees within 1e-6 budget
        seq = parse_seq_spec("gtm:3:001")
        v, err = dirichlet_mp(seq, 1, cache)
        dv, derr = dirichlet_direct(seq, 1, 10**7)
        assert 4 * err < 1e-6
        assert abs(float(v) - dv) <= 1e-6 + derr

    def test_monotone_under_tighter_internal_caps(self, cache, monkeypatch):
        import gtmprod.dirichlet as dmod
        seq = parse_seq_spec("gtm:3:11")
        v1, eps1 = dirichlet_value(seq, 2, cache=cache)
        monkeypatch.setattr(dmod, "_MP_EPS", dmod._MP_EPS / 100.0)
        monkeypatch.setattr(dmod, "_MP_DPS", dmod._MP_DPS + 10)
        v2, _ = dirichlet_value(seq, 2, cache=DirichletCache())
        assert abs(v1 - v2) <= eps1


class TestCache:
    def test_round_trip_bit_identical(self, tmp_path):
        path = tmp_path / "dirichlet.cache"
        c1 = DirichletCache(path)
        seq = parse_seq_spec("gtm:2:1")
        v1, e1 = dirichlet_value(seq, 3, cache=c1)
        c2 = DirichletCache(path)
        hit = c2.lookup(seq.spec, 3, 1e-10)
        assert hit is not None
        assert struct.pack(">d", hit.value) == struct.pack(">d", v1)
        assert hit.eps == e1

    def test_eps_gating(self, tmp_path):
        path = tmp_path / "dirichlet.cache"
        c = DirichletCache(path)
        c.store("gtm:2:1", 5, 1.25, 1e-6, "ladder")
        assert c.lookup("gtm:2:1", 5, 1e-5) is not None
        assert c.lookup("gtm:2:1", 5, 1e-9) is None
        seq = parse_seq_spec("gtm:2:1")
        v, eps = dirichlet_value(seq, 5, eps=1e-12, cache=c)
        assert eps <= 1e-12 and v != 1.25

    def test_unknown_lines_ignored(self, tmp_path):
        path = tmp_path / "dirichlet.cache"
        good = f"gtm:2:1|2|{struct.pack('>d', -1.5).hex()}|1e-10|ladder"
        path.write_text("# comment\nnot a record\na|b|c\n" + good + "\nbad|x|zz|1e-3|m\n")
        c = DirichletCache(path)
        assert c.lookup("gtm:2:1", 2, 1e-9).value == -1.5
        assert c.lookup("a", 0, 1.0) is None

    def test_env_var_default_location(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GTMPROD_CACHE_DIR", str(tmp_path))
        from gtmprod.dirichlet import default_cache_path
        assert default_cache_path() == tmp_path / "dirichlet.cache"

    def test_atomic_rewrite(self, tmp_path):
        path = tmp_path / "dirichlet.cache"
        c = DirichletCache(path)
        c.store("gtm:2:1", 2, 0.5, 1e-10, "ladder")
        c.store("gtm:2:1", 3, 0.25, 1e-10, "ladder")
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert not (tmp_path / "dirichlet.cache.tmp").exists()


class TestDirectOracle:
    def test_zeta3_by_summation(self):
        seq = make_sequence("gtm", 3, bits="00")
        v, err = dirichlet_direct(seq, 3, 10**4)
        assert abs(v - 1.2020569031595943) < 1e-7
        assert abs(v - 1.2020569031595943) <= err

    def test_error_estimate_covers(self, cache):
        with mp.workdps(40):
            for spec in ("gtm:2:1", "gtm:4:010", "dcount:3:2"):
                seq = parse_seq_spec(spec)
                for s in (1, 2):
                    truth, terr = dirichlet_mp(seq, s, cache)
                    v, err = dirichlet_direct(seq, s, 10**5)
                    assert abs(v - float(truth)) <= err + 4 * terr, (spec, s)

    def test_input_validation(self):
        seq = parse_seq_spec("gtm:2:1")
        with pytest.raises(ValueError):
            dirichlet_direct(seq, 0, 100)
        with pytest.raises(ValueError):
            dirichlet_direct(seq, 2, 3)

import pytest

from quantum.services import (
    from_db,
    lossless_squeezing_db,
    quantum_advantage_db,
    squeezing_db,
    to_db,
)
from quantum.services.exceptions import SnrDomainError, UndefinedSqueezingError


class TestQuantumAdvantage:
    def test_equal_snrs(self):
        assert quantum_advantage_db(3.0, 3.0) == 0.0

    def test_noise_power_four_db_lower(self):
        signal = 1.0
        coherent_noise = 2e-3

        advantage = quantum_advantage_db(signal / (coherent_noise * 10 ** -0.4), signal / coherent_noise)

        assert advantage == pytest.approx(4.0, abs=1e-12)

    def test_doubled_snr(self):
        assert quantum_advantage_db(2.0, 1.0) == pytest.approx(3.0103, abs=1e-4)

    @pytest.mark.parametrize("snrs", [(0.0, 1.0), (1.0, -1.0)])
    def test_rejects_non_positive_snr(self, snrs):
        with pytest.raises(SnrDomainError):
            quantum_advantage_db(*snrs)


class TestSqueezingDb:
    def test_shot_noise_is_zero_db(self):
        assert squeezing_db(5.0, 5.0) == 0.0

    def test_excess_noise_is_negative(self):
        assert squeezing_db(10.0, 5.0) < 0

    def test_rejects_zero_snl(self):
        with pytest.raises(UndefinedSqueezingError):
            squeezing_db(1.0, 0.0)

    def test_lossless_source(self):
        assert lossless_squeezing_db(3.51) == pytest.approx(7.796, abs=1e-3)

    def test_db_round_trip(self):
        assert from_db(to_db(0.37)) == pytest.approx(0.37, rel=1e-14)

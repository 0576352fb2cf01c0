import itertools

import numpy as np
import pytest

from quantum.services import (
    CELL_WINDOW,
    CONJUGATE,
    DETECTOR_EFFICIENCY,
    PATH_OPTICS,
    PROBE,
    SENSOR_REFLECTIVITY,
    LossChain,
    LossPoint,
    LossStage,
    TwinBeamSource,
    apply_loss_chain,
    cumulative_budgets,
    lossless_squeezing_db,
    matched_conjugate_attenuation,
    optimal_conjugate_transmission,
    shot_noise_reference,
    symmetric_loss_squeezing_db,
)
from quantum.services.exceptions import UndefinedSqueezingError


class TestLossChain:
    def setup_method(self):
        self.chain = LossChain(
            probe_stages=(LossStage(CELL_WINDOW, 0.92), LossStage(SENSOR_REFLECTIVITY, 0.4)),
            conjugate_stages=(LossStage(CELL_WINDOW, 0.92),),
        )

    def test_effective_transmission_is_product(self):
        assert self.chain.effective_transmission(PROBE) == pytest.approx(0.92 * 0.4)
        assert self.chain.effective_transmission(CONJUGATE) == pytest.approx(0.92)

    def test_empty_chain_is_lossless(self):
        assert LossChain().effective_transmission(PROBE) == 1.0

    def test_with_stage_replaces_existing_label(self):
        updated = self.chain.with_stage(SENSOR_REFLECTIVITY, 0.1)

        assert len(updated.probe_stages) == 2
        assert updated.effective_transmission(PROBE) == pytest.approx(0.092)
        assert self.chain.effective_transmission(PROBE) == pytest.approx(0.368)

    def test_with_stage_appends_new_label(self):
        updated = self.chain.with_stage(DETECTOR_EFFICIENCY, 0.9, beam=CONJUGATE)

        assert [s.label for s in updated.conjugate_stages] == [CELL_WINDOW, DETECTOR_EFFICIENCY]

    @pytest.mark.parametrize("transmission", [-0.01, 1.01])
    def test_rejects_transmission_outside_unit_interval(self, transmission):
        with pytest.raises(ValueError):
            LossStage(PATH_OPTICS, transmission)

    def test_rejects_unknown_beam(self):
        with pytest.raises(ValueError):
            self.chain.stages("pump")


class TestApplyLossChain:
    GAIN = 3.51
    SEED_FLUX = 1e6

    def setup_method(self):
        self.source = TwinBeamSource(gain=self.GAIN, seed_flux=self.SEED_FLUX)

    def test_lossless_squeezing_is_source_value(self):
        budget = apply_loss_chain(self.source, LossChain())

        assert budget.squeezing_db == pytest.approx(10 * np.log10(2 * self.GAIN - 1), abs=1e-12)
        assert budget.squeezing_db == pytest.approx(7.8, abs=0.01)
        assert budget.variance_diff == pytest.approx(self.SEED_FLUX)

    def test_half_transmission(self):
        budget = apply_loss_chain(self.source, LossChain.symmetric(0.5))

        assert budget.variance_diff == pytest.approx(1.755e6, rel=1e-12)
        assert budget.snl == pytest.approx(3.01e6, rel=1e-12)
        assert budget.squeezing_db == pytest.approx(2.343, abs=1e-3)
        assert budget.eta_probe == budget.eta_conjugate == 0.5

    @pytest.mark.parametrize("eta", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    def test_symmetric_loss_reduction(self, eta):
        budget = apply_loss_chain(self.source, LossChain.symmetric(eta))

        expected = symmetric_loss_squeezing_db(lossless_squeezing_db(self.GAIN), eta)
        assert budget.squeezing_db == pytest.approx(expected, abs=1e-10)

    def test_squeezing_vanishes_as_symmetric_loss_becomes_total(self):
        budget = apply_loss_chain(self.source, LossChain.symmetric(1e-9))

        assert budget.squeezing_db == pytest.approx(0.0, abs=1e-6)

    def test_total_loss_is_undefined(self):
        with pytest.raises(UndefinedSqueezingError):
            apply_loss_chain(self.source, LossChain.symmetric(0.0))

    def test_stage_order_does_not_matter(self):
        stages = [
            LossStage(CELL_WINDOW, 0.92),
            LossStage(PATH_OPTICS, 0.83),
            LossStage(SENSOR_REFLECTIVITY, 0.41),
            LossStage(DETECTOR_EFFICIENCY, 0.95),
        ]
        budgets = {
            apply_loss_chain(self.source, LossChain(probe_stages=order, conjugate_stages=stages[:2]))
            for order in itertools.permutations(stages)
        }

        assert len(budgets) == 1

    def test_budget_row_uses_csv_columns(self):
        row = apply_loss_chain(self.source, LossChain.symmetric(0.5), point_label="B").to_row()

        assert tuple(row) == ("point_label", "eta_probe", "eta_conj", "variance_diff", "snl", "squeezing_db")
        assert row["point_label"] == "B"


class TestSqueezingVersusLoss:
    GAIN = 3.51
    TRANSMISSIONS = np.linspace(1.0, 0.05, 40)

    def setup_method(self):
        self.source = TwinBeamSource(gain=self.GAIN, seed_flux=1e6)

    def test_symmetric_chain_is_monotone(self):
        values = [apply_loss_chain(self.source, LossChain.symmetric(eta)).squeezing_db for eta in self.TRANSMISSIONS]

        assert np.all(np.diff(values) <= 0)

    @pytest.mark.parametrize("varied", [CELL_WINDOW, SENSOR_REFLECTIVITY, DETECTOR_EFFICIENCY])
    def test_matched_attenuation_is_monotone_in_every_stage(self, varied):
        base = LossChain(probe_stages=(
            LossStage(CELL_WINDOW, 0.92),
            LossStage(SENSOR_REFLECTIVITY, 0.5),
            LossStage(DETECTOR_EFFICIENCY, 0.9),
        ))

        values = [
            apply_loss_chain(self.source, matched_conjugate_attenuation(base.with_stage(varied, eta))).squeezing_db
            for eta in self.TRANSMISSIONS
        ]

        assert np.all(np.diff(values) <= 1e-12)

    def test_probe_only_loss_can_raise_squeezing(self):
        lossless = apply_loss_chain(self.source, LossChain())
        probe_only = apply_loss_chain(self.source, LossChain.from_transmissions(0.9, 1.0))

        assert probe_only.variance_diff / probe_only.snl == pytest.approx(0.1456, abs=1e-3)
        assert probe_only.squeezing_db > lossless.squeezing_db

    @pytest.mark.parametrize("gain", [3.51, 5.0])
    @pytest.mark.parametrize("product", [0.0676, 0.25, 0.5])
    def test_balanced_loss_beats_strong_imbalance(self, gain, product):
        source = TwinBeamSource(gain=gain, seed_flux=1e6)
        balanced = apply_loss_chain(source, LossChain.symmetric(np.sqrt(product)))

        for ratio in (1.5, 1 / 1.5):
            eta_probe = np.sqrt(product * ratio)
            imbalanced = apply_loss_chain(source, LossChain.from_transmissions(eta_probe, product / eta_probe))
            assert balanced.squeezing_db > imbalanced.squeezing_db

    @pytest.mark.parametrize("eta_probe", [0.26, 0.5, 0.75])
    def test_optimal_conjugate_transmission_is_not_below_probe(self, eta_probe):
        optimum = optimal_conjugate_transmission(self.source, eta_probe)

        assert optimum >= eta_probe
        best = apply_loss_chain(self.source, LossChain.from_transmissions(eta_probe, optimum))
        matched = apply_loss_chain(self.source, LossChain.symmetric(eta_probe))
        assert best.squeezing_db >= matched.squeezing_db


class TestMatchedConjugateAttenuation:
    def test_conjugate_follows_probe(self):
        chain = LossChain(
            probe_stages=(LossStage(CELL_WINDOW, 0.92), LossStage(SENSOR_REFLECTIVITY, 0.26 / 0.92)),
            conjugate_stages=(LossStage(PATH_OPTICS, 1.0),),
        )

        matched = matched_conjugate_attenuation(chain)

        assert matched.effective_transmission(CONJUGATE) == pytest.approx(0.26)

    def test_lossless_probe_leaves_conjugate_lossless(self):
        matched = matched_conjugate_attenuation(LossChain())

        assert matched.effective_transmission(CONJUGATE) == 1.0

    def test_time_varying_reflectivity_is_tracked_pointwise(self):
        chain = LossChain(probe_stages=(LossStage(CELL_WINDOW, 0.92),))
        reflectivity_trace = 0.41 + 0.05 * np.sin(np.linspace(0, 3, 50))

        for value in reflectivity_trace:
            matched = matched_conjugate_attenuation(chain.with_stage(SENSOR_REFLECTIVITY, float(value)))
            assert matched.effective_transmission(CONJUGATE) == matched.effective_transmission(PROBE)


class TestShotNoiseReference:
    def test_reference_is_poissonian(self):
        source = TwinBeamSource(gain=3.51, seed_flux=1e6)
        budget = apply_loss_chain(source, LossChain.symmetric(0.5), point_label="B")

        reference = shot_noise_reference(budget)

        assert reference.variance_diff == reference.snl == budget.snl
        assert reference.squeezing_db == 0.0
        assert reference.covariance == 0.0
        assert reference.var_probe == budget.mean_probe
        assert reference.point_label == "B"


class TestCumulativeBudgets:
    def test_points_along_the_chain(self):
        source = TwinBeamSource(gain=3.51, seed_flux=1e6)
        chain = LossChain(
            probe_stages=(LossStage(CELL_WINDOW, 0.92), LossStage(SENSOR_REFLECTIVITY, 0.5)),
            conjugate_stages=(LossStage(CELL_WINDOW, 0.92), LossStage(PATH_OPTICS, 0.5)),
        )

        budgets = cumulative_budgets(source, chain, [LossPoint("A", 1, 1), LossPoint("B", 2, 2)])

        assert [b.point_label for b in budgets] == ["A", "B"]
        assert budgets[0].eta_probe == pytest.approx(0.92)
        assert budgets[1].eta_probe == pytest.approx(0.46)
        assert budgets[0].squeezing_db > budgets[1].squeezing_db

import math

import numpy as np
import pytest

from forevalkit import (
    ValidationError,
    cd_diagram_data,
    diebold_mariano,
    friedman,
    ljung_box,
    nemenyi_cd,
    p_adjust,
    rank_models,
    render_cd_svg,
    render_cd_text,
    wilcoxon_rank_sum,
)
from forevalkit.stats import PostHocResult, studentized_range_quantile


class TestLjungBox:
    def test_alternating_rejects(self):
        r = ljung_box([1.0, -1.0] * 20, lags=1)
        assert r.reject and r.statistic > 30

    def test_white_noise_usually_accepts(self, rng):
        rejections = sum(
            ljung_box(rng.normal(0, 1, 400), lags=10).reject for _ in range(200)
        )
        assert rejections < 30  # near the nominal 5% level

    def test_underfit_ar_residuals_reject(self, rng):
        # an order-1 fit on strongly order-2 data leaves autocorrelation behind
        from forevalkit import DgpSpec, generate
        from forevalkit.olsar import fit_ar, one_step_predictions

        s = generate(DgpSpec(kind="ar", length=600, seed=11, ar_coefficients=(0.0, 0.8)))
        fit = fit_ar(s.values[:300], 1)
        preds = one_step_predictions(fit, s.values)
        resid = s.values[300:] - preds[299:]
        assert ljung_box(resid, lags=10, fitted_params=1).reject

    def test_df_floor(self):
        r = ljung_box(np.sin(np.arange(50.0)), lags=2, fitted_params=5)
        assert r.details["df"] == 1

    def test_constant_residuals_error(self):
        with pytest.raises(ValidationError):
            ljung_box([2.0] * 30, lags=3)

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            ljung_box([1.0, 2.0], lags=5)


class TestDieboldMariano:
    def test_identical_losses_tie(self):
        r = diebold_mariano([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
        assert r.details.get("tie") and r.p_value == 1.0 and not r.reject

    def test_dominated_model_rejected_with_sign(self, rng):
        # model A's losses are systematically smaller
        base = rng.normal(0, 1, 300) ** 2
        r = diebold_mariano(base, base + 0.8 + rng.normal(0, 0.1, 300))
        assert r.reject and r.statistic < 0

    def test_h1_reduces_to_variance_only(self, rng):
        a = rng.normal(0, 1, 50) ** 2
        b = rng.normal(0, 1, 50) ** 2
        r1 = diebold_mariano(a, b, horizon=1, harvey_correction=False)
        d = a - b
        dc = d - d.mean()
        v = float(dc @ dc) / 50
        expect = d.mean() / math.sqrt(v / 50)
        assert r1.statistic == pytest.approx(expect, rel=1e-12)

    def test_unequal_lengths_rejected(self):
        with pytest.raises(ValidationError):
            diebold_mariano([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0])

    def test_harvey_correction_shrinks_statistic(self, rng):
        a = rng.normal(0, 1, 60) ** 2
        b = rng.normal(0, 1, 60) ** 2 + 0.5
        plain = diebold_mariano(a, b, horizon=4, harvey_correction=False)
        corrected = diebold_mariano(a, b, horizon=4, harvey_correction=True)
        assert abs(corrected.statistic) < abs(plain.statistic)


class TestWilcoxon:
    def test_identical_samples(self):
        assert wilcoxon_rank_sum([1, 1, 1], [1, 1, 1]).p_value == 1.0

    def test_shifted_distributions_power(self, rng):
        rejections = sum(
            wilcoxon_rank_sum(rng.normal(0, 1, 50), rng.normal(1.0, 1, 50)).reject
            for _ in range(100)
        )
        assert rejections > 90

    def test_monotone_transform_invariance(self, rng):
        a = rng.uniform(0, 1, 20)
        b = rng.uniform(0, 1, 20)
        r1 = wilcoxon_rank_sum(a, b)
        r2 = wilcoxon_rank_sum(np.exp(3 * a), np.exp(3 * b))
        assert r1.statistic == pytest.approx(r2.statistic, rel=1e-12)

    def test_paired_variant(self, rng):
        a = rng.normal(0, 1, 40)
        r = wilcoxon_rank_sum(a, a + 1.0, paired=True)
        assert r.name == "wilcoxon-signed-rank" and r.reject

    def test_paired_all_zero_diffs_tie(self):
        a = [1.0, 2.0, 3.0]
        assert wilcoxon_rank_sum(a, a, paired=True).p_value == 1.0


class TestFriedman:
    def test_all_tied_zero_statistic(self):
        t = rank_models({m: [1.0, 2.0, 3.0] for m in "ABC"})
        r = friedman(t)
        assert r.statistic == 0.0 and r.p_value == 1.0

    def test_dominant_model_rejected(self, rng):
        scores = {
            "best": rng.normal(0, 0.1, 50),
            "mid": rng.normal(3, 0.1, 50),
            "worst": rng.normal(6, 0.1, 50),
        }
        r = friedman(rank_models(scores), alpha=0.01)
        assert r.reject

    def test_label_permutation_invariance(self, rng):
        scores = {m: rng.uniform(0, 1, 20) for m in "ABCD"}
        r1 = friedman(rank_models(scores))
        shuffled = {m: scores[m] for m in "DCBA"}
        r2 = friedman(rank_models(shuffled))
        assert r1.statistic == pytest.approx(r2.statistic, rel=1e-12)

    def test_per_series_monotone_transform_invariance(self, rng):
        # a different strictly increasing map per series leaves ranks, and
        # therefore the statistic, untouched
        n = 15
        scores = {m: rng.uniform(0, 1, n) for m in "ABCD"}
        r1 = friedman(rank_models(scores))
        offsets = rng.uniform(1, 5, n)
        powers = rng.uniform(1, 3, n)
        transformed = {m: (v + offsets) ** powers for m, v in scores.items()}
        r2 = friedman(rank_models(transformed))
        assert r1.statistic == pytest.approx(r2.statistic, rel=1e-12)

    def test_minimums(self):
        with pytest.raises(ValidationError):
            friedman(rank_models({"A": [1.0], "B": [2.0]}))


class TestNemenyi:
    def test_cd_formula(self, rng):
        t = rank_models({m: rng.uniform(0, 1, 10) for m in "ABC"})
        r = nemenyi_cd(t, alpha=0.05)
        q = studentized_range_quantile(0.05, 3) / math.sqrt(2)
        assert r.critical_distance == pytest.approx(q * math.sqrt(12 / 60), rel=1e-12)

    def test_cd_quarter_n_halves(self, rng):
        t1 = rank_models({m: rng.uniform(0, 1, 25) for m in "ABCDE"})
        t2 = rank_models({m: rng.uniform(0, 1, 100) for m in "ABCDE"})
        cd1 = nemenyi_cd(t1).critical_distance
        cd2 = nemenyi_cd(t2).critical_distance
        assert cd2 == cd1 / 2  # exact: only the N under the root changes

    def test_k_out_of_table(self, rng):
        t = rank_models({f"m{i}": rng.uniform(0, 1, 5) for i in range(25)})
        with pytest.raises(ValidationError, match="k <= 20"):
            nemenyi_cd(t)

    def test_alpha_out_of_table(self, rng):
        t = rank_models({m: rng.uniform(0, 1, 5) for m in "ABC"})
        with pytest.raises(ValidationError, match="alpha"):
            nemenyi_cd(t, alpha=0.2)

    def test_groups_reflexive_symmetric(self, rng):
        t = rank_models({m: rng.uniform(0, 1, 8) for m in "ABCDEF"})
        r = nemenyi_cd(t)
        for (a, b), significant in r.pairwise.items():
            assert r.pairwise.get((a, b)) == significant
            joined = any(a in g and b in g for g in r.groups)
            if joined:
                assert not significant  # grouped pairs are never significant

    def test_warns_without_prior_rejection(self, rng):
        t = rank_models({m: rng.uniform(0, 1, 3) for m in "AB"})
        not_rejected = friedman(t)
        assert not not_rejected.reject
        with pytest.warns(UserWarning, match="did not reject"):
            nemenyi_cd(t, friedman_result=not_rejected)

    def test_constructed_topology(self):
        # three interchangeable good models, three interchangeable bad ones:
        # two bars, every cross-tier pair significant
        local = np.random.default_rng(99)
        n = 30
        scores = {m: local.uniform(0, 1, n) for m in "ABC"}
        scores.update({m: 10.0 + local.uniform(0, 1, n) for m in "DEF"})
        r = nemenyi_cd(rank_models(scores), alpha=0.05)
        top = frozenset({"A", "B", "C"})
        bottom = frozenset({"D", "E", "F"})
        assert top in r.groups and bottom in r.groups
        assert r.pairwise[("A", "D")] and r.pairwise[("C", "F")]
        assert not r.pairwise[("A", "B")]


class TestPAdjust:
    def test_single_comparison_identity(self):
        for method in ("holm", "hochberg", "bonferroni-dunn"):
            r = p_adjust({("A", "B"): 0.04}, method)
            assert r.pairwise[("A", "B")] == pytest.approx(0.04)

    def test_bonferroni_dunn_multiplies(self):
        p = {("A", "B"): 0.01, ("A", "C"): 0.01, ("A", "D"): 0.01, ("B", "C"): 0.01}
        r = p_adjust(p, "bonferroni-dunn")
        assert all(v == pytest.approx(0.04) for v in r.pairwise.values())

    def test_holm_dominates_bonferroni(self, rng):
        for _ in range(30):
            keys = [("A", "B"), ("A", "C"), ("B", "C"), ("A", "D")]
            p = {k: float(rng.uniform(0, 1)) for k in keys}
            holm = p_adjust(p, "holm").pairwise
            bonf = p_adjust(p, "bonferroni-dunn").pairwise
            for k in keys:
                assert holm[k] <= bonf[k] + 1e-15

    def test_monotone_in_raw_order(self, rng):
        for method in ("holm", "hochberg", "bonferroni-dunn"):
            p = {(i, i + 1): float(v) for i, v in enumerate(rng.uniform(0, 1, 6))}
            adj = p_adjust(p, method).pairwise
            pairs = sorted(p, key=lambda k: p[k])
            adjusted_in_order = [adj[k] for k in pairs]
            assert adjusted_in_order == sorted(adjusted_in_order)

    def test_hochberg_le_holm(self, rng):
        for _ in range(30):
            keys = [("A", "B"), ("A", "C"), ("B", "C")]
            p = {k: float(rng.uniform(0, 1)) for k in keys}
            holm = p_adjust(p, "holm").pairwise
            hoch = p_adjust(p, "hochberg").pairwise
            for k in keys:
                assert hoch[k] <= holm[k] + 1e-15

    def test_invalid_p_rejected(self):
        with pytest.raises(ValidationError):
            p_adjust({("A", "B"): 1.2}, "holm")
        with pytest.raises(ValidationError):
            p_adjust({}, "holm")

    def test_groups_from_nonsignificant_cliques(self):
        p = {("A", "B"): 0.9, ("B", "C"): 0.9, ("A", "C"): 0.001}
        r = p_adjust(p, "bonferroni-dunn", alpha=0.05)
        group_sets = set(r.groups)
        assert frozenset({"A", "B"}) in group_sets
        assert frozenset({"B", "C"}) in group_sets
        assert frozenset({"A", "B", "C"}) not in group_sets


class TestCdDiagram:
    def make_posthoc(self, mean_ranks, cd, groups):
        pairwise = {}
        names = list(mean_ranks)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                pairwise[(a, b)] = abs(mean_ranks[a] - mean_ranks[b]) > cd
        return PostHocResult(method="nemenyi", pairwise=pairwise, alpha=0.05,
                             mean_ranks=mean_ranks, critical_distance=cd,
                             groups=tuple(frozenset(g) for g in groups))

    def test_overlapping_bars_share_model(self):
        ranks = {"A": 1.0, "B": 1.5, "C": 2.0, "D": 3.5, "E": 4.0, "F": 4.5}
        ph = self.make_posthoc(ranks, 1.2, [{"A", "B", "C"}, {"D", "E"}, {"E", "F"}])
        layout = cd_diagram_data(ph)
        assert len(layout.bars) == 3
        members = [set(b[2]) for b in layout.bars]
        assert {"D", "E"} in members and {"E", "F"} in members

    def test_single_group_single_bar(self):
        ranks = {"A": 1.9, "B": 2.0, "C": 2.1}
        ph = self.make_posthoc(ranks, 1.0, [{"A", "B", "C"}])
        assert len(cd_diagram_data(ph).bars) == 1

    def test_all_significant_zero_bars(self):
        ranks = {"A": 1.0, "B": 3.0}
        ph = self.make_posthoc(ranks, 0.5, [{"A"}, {"B"}])
        layout = cd_diagram_data(ph)
        assert layout.bars == ()

    def test_renderers_deterministic(self):
        ranks = {"A": 1.0, "B": 2.5, "C": 3.0}
        ph = self.make_posthoc(ranks, 1.0, [{"B", "C"}])
        layout = cd_diagram_data(ph)
        text1, text2 = render_cd_text(layout), render_cd_text(layout)
        assert text1 == text2 and "CD" in text1 and "A" in text1
        svg = render_cd_svg(layout)
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        assert svg.count("<circle") == 3

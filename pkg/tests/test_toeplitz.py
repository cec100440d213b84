import math
import unittest

import numpy as np

from dpilab.errors import DomainError, NumericalError
from dpilab.spectra import PiecewiseConstant, RationalArma, White
from dpilab.toeplitz import (
    MAX_ORDER,
    covariance_matrix,
    log_det,
    matrix_log_det,
    szego_convergence_table,
    toeplitz_eigenvalues,
)


class CovarianceMatrixTest(unittest.TestCase):
    def test_structure(self):
        sp = RationalArma(ar=(0.5,), sigma2=1.0)
        mat = covariance_matrix(sp, 6)
        r = sp.autocovariance(6)
        for i in range(6):
            for j in range(6):
                self.assertAlmostEqual(mat[i, j], r[abs(i - j)], places=12)

    def test_white_is_diagonal(self):
        mat = covariance_matrix(White(3.0), 4)
        np.testing.assert_allclose(mat, 3.0 * np.eye(4), atol=1e-15)

    def test_order_validation(self):
        self.assertRaises(DomainError, covariance_matrix, White(1.0), 0)
        self.assertRaises(DomainError, covariance_matrix, White(1.0), MAX_ORDER + 1)


class EigenvalueTest(unittest.TestCase):
    def test_ma1_closed_form(self):
        # tridiagonal Toeplitz: lam_k = r0 + 2 r1 cos(k pi/(n+1))
        b, s2, n = 0.5, 1.0, 16
        sp = RationalArma(ma=(b,), sigma2=s2)
        eigs = toeplitz_eigenvalues(sp, n)
        k = np.arange(1, n + 1)
        expected = np.sort(s2 * (1 + b * b) + 2 * s2 * b * np.cos(k * np.pi / (n + 1)))
        np.testing.assert_allclose(eigs, expected, atol=1e-10)

    def test_white_eigenvalues_flat(self):
        eigs = toeplitz_eigenvalues(White(2.0), 12)
        np.testing.assert_allclose(eigs, 2.0, atol=1e-14)

    def test_sorted_ascending(self):
        eigs = toeplitz_eigenvalues(RationalArma(ar=(0.8,), sigma2=1.0), 32)
        self.assertTrue(np.all(np.diff(eigs) >= 0))

    def test_mean_eigenvalue_is_power(self):
        # trace identity: mean eigenvalue equals r_0 exactly
        sp = PiecewiseConstant.from_half_band([0.2], [0.5, 2.0])
        eigs = toeplitz_eigenvalues(sp, 48)
        self.assertAlmostEqual(float(np.mean(eigs)), sp.power(), places=12)


class LogDetTest(unittest.TestCase):
    def test_agrees_with_eigenvalue_sum(self):
        sp = RationalArma(ar=(0.5,), sigma2=1.0)
        n = 64
        via_chol = log_det(sp, n)
        via_eigs = float(np.sum(np.log(toeplitz_eigenvalues(sp, n))))
        self.assertLess(abs(via_chol - via_eigs), 1e-8 * abs(via_eigs))

    def test_matrix_log_det_rejects_singular(self):
        self.assertRaises(NumericalError, matrix_log_det, np.zeros((3, 3)))

    def test_white_value(self):
        self.assertAlmostEqual(log_det(White(2.0), 8), 8 * math.log(2.0), places=12)


class SzegoTableTest(unittest.TestCase):
    def test_ar_gap_shrinks(self):
        sp = RationalArma(ar=(0.9,), sigma2=1.0)
        rows = szego_convergence_table(sp, [64, 128, 256, 512])
        gaps = [r["gap"] for r in rows]
        self.assertTrue(all(b < a for a, b in zip(gaps, gaps[1:])))
        self.assertLessEqual(gaps[-1], 0.05)
        # limit column is ln sigma2 = 0 here
        self.assertAlmostEqual(rows[0]["limit"], 0.0, places=12)

    def test_white_exact_at_every_order(self):
        rows = szego_convergence_table(White(1.7), [4, 16, 64])
        for r in rows:
            self.assertLess(r["gap"], 1e-12)

    def test_orders_must_ascend(self):
        self.assertRaises(DomainError, szego_convergence_table, White(1.0), [16, 8])
        self.assertRaises(DomainError, szego_convergence_table, White(1.0), [16, 16])


if __name__ == "__main__":
    unittest.main()

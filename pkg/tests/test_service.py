import math

import pytest
from fastapi.testclient import TestClient

from dpilab.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and "version" in body


def test_alpha_endpoint(client):
    resp = client.post(
        "/alpha",
        json={"spectra": [{"kind": "white", "level": 1.0}, {"kind": "white", "level": 2.0}]},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert abs(body["alphas"][0] - 1.0 / 3.0) < 1e-9
    assert abs(body["alpha_sum"] - 1.0) < 1e-9
    assert body["proportional"] is True


def test_alpha_needs_two_spectra(client):
    resp = client.post("/alpha", json={"spectra": [{"kind": "white", "level": 1.0}]})
    assert resp.status_code == 422


def test_dpi_discrete_endpoint(client):
    resp = client.post(
        "/dpi/discrete",
        json={
            "models": [
                {"kind": "gaussian", "spectrum": {"kind": "white", "level": 1.0}},
                {
                    "kind": "gaussian",
                    "spectrum": {
                        "kind": "piecewise",
                        "half_band_edges": [0.25],
                        "levels": [1.0, 3.0],
                    },
                },
            ]
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert abs(body["margin"] - 0.034074) < 1e-6
    assert body["equality"] is False


def test_dpi_unsupported_pair_maps_to_422(client):
    resp = client.post(
        "/dpi/discrete",
        json={
            "models": [
                {"kind": "filtered_iid", "innovation": {"kind": "uniform", "half_width": 1.0}, "ar": [0.5]},
                {"kind": "filtered_iid", "innovation": {"kind": "laplace", "scale": 1.0}, "ar": [-0.3]},
            ]
        },
    )
    assert resp.status_code == 422
    assert "detail" in resp.json()


def test_dpi_continuous_endpoint(client):
    model = {
        "bandwidth": 0.5,
        "shape": {"kind": "white", "level": 1.0},
    }
    other = {
        "bandwidth": 0.5,
        "shape": {"kind": "piecewise", "half_band_edges": [0.25], "levels": [1.0, 3.0]},
    }
    resp = client.post("/dpi/continuous", json={"models": [model, other]})
    assert resp.status_code == 200
    assert abs(resp.json()["margin"] - 0.034074) < 1e-6


def test_iid_sum_endpoint(client):
    resp = client.post(
        "/iid-sum", json={"distribution": {"kind": "uniform", "half_width": 1.0}, "n_max": 3}
    )
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert len(rows) == 3
    assert abs(rows[0]["divergence"] - 0.176485) < 1e-5
    assert rows[1]["divergence"] < rows[0]["divergence"]


def test_szego_endpoint(client):
    resp = client.post(
        "/szego",
        json={"spectrum": {"kind": "arma", "ar": [0.9], "ma": [], "sigma2": 1.0}, "sizes": [64, 256]},
    )
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert rows[-1]["gap"] < rows[0]["gap"]


def test_epi_gaussian_endpoint(client):
    resp = client.post(
        "/epi/gaussian",
        json={"cov_x": [[1.0, 0.0], [0.0, 4.0]], "cov_y": [[4.0, 0.0], [0.0, 1.0]]},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["margin"] > 0
    assert body["proportional"] is False


def test_epi_scalar_endpoint(client):
    resp = client.post(
        "/epi/scalar",
        json={
            "x": {"kind": "uniform", "half_width": 1.7320508075688772},
            "y": {"kind": "uniform", "half_width": 1.7320508075688772},
        },
    )
    assert resp.status_code == 200
    assert abs(resp.json()["margin"] - 8.61) < 0.01


def test_cmmse_check_endpoint(client):
    resp = client.post(
        "/cmmse/check",
        json={"lambda_u": [1.0], "lambda_v": [4.0], "mixing_angle": math.pi / 4.0, "q": 1.0},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert abs(body["cmmse"]["lhs"] - 1.2528) < 1e-4
    assert abs(body["divergence"]["lhs"] - 0.6236) < 1e-4


def test_cmmse_trajectory_endpoint(client):
    resp = client.post(
        "/cmmse/trajectory", json={"eigenvalue": 1.0, "q": 1.0, "steps": 256}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["times"]) == 257
    assert abs(body["closed_form_integrated"] - math.log(2.0)) < 1e-12
    assert body["integrated"] >= body["closed_form_integrated"]


def test_cmmse_simulate_endpoint(client):
    resp = client.post(
        "/cmmse/simulate",
        json={"eigenvalue": 1.0, "q": 1.0, "steps": 128, "n_paths": 500, "seed": 1},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["n_paths"] == 500
    assert all("z" in row for row in body["rows"])


def test_entropy_mix_endpoint(client):
    resp = client.post(
        "/cmmse/entropy-mix",
        json={
            "u": {"kind": "uniform", "half_width": 1.0},
            "v": {"kind": "uniform", "half_width": 1.0},
            "mixing_angle": math.pi / 4.0,
        },
    )
    assert resp.status_code == 200
    assert resp.json()["margin"] >= 0.0


def test_experiments_endpoint(client):
    resp = client.post("/experiments", json={"suite": "szego", "seed": 0})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True and body["schema"] == 1


def test_experiments_rejects_out_field_effects(client):
    # the service never writes files; out is accepted by schema but unused
    resp = client.post("/experiments", json={"suite": "szego", "seed": 0, "out": "/tmp/x"})
    assert resp.status_code == 200


def test_unknown_fields_rejected(client):
    resp = client.post(
        "/alpha",
        json={"spectra": [{"kind": "white", "level": 1.0}, {"kind": "white", "level": 1.0}], "bogus": 1},
    )
    assert resp.status_code == 422


def test_validation_error_names_field(client):
    resp = client.post(
        "/cmmse/trajectory", json={"eigenvalue": -1.0, "q": 1.0}
    )
    assert resp.status_code == 422

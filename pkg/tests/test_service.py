import pytest
from fastapi.testclient import TestClient

from gaugeproj import __version__
from gaugeproj.service.app import app
from gaugeproj.service.jobs import run_projector, run_verify
from gaugeproj.service.reporting import render_csv, render_json
from gaugeproj.service.schemas import SCHEMA_VERSION, RunConfig


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


SO2_CFG = {"model": {"type": "so_n_vector", "n": 2}, "cutoff": 4}


class TestConfigValidation:
    def test_defaults_materialized(self):
        cfg = RunConfig.model_validate(SO2_CFG)
        assert cfg.quadrature.rule == "trapezoid"
        assert cfg.quadrature.order == 4
        assert cfg.model.potential.kind == "harmonic"
        assert cfg.tolerances.projector_idempotency == 1e-10

    def test_ym_defaults(self):
        cfg = RunConfig.model_validate({"model": {"type": "su2_ym"}, "cutoff": 4})
        assert cfg.model.coupling_g == 1.0
        assert cfg.model.potential.kind == "yang_mills_quartic"
        assert cfg.quadrature.rule == "euler_product"

    def test_vector_model_requires_n(self):
        with pytest.raises(ValueError):
            RunConfig.model_validate({"model": {"type": "so_n_vector"}, "cutoff": 4})

    def test_cutoff_must_cover_potential_degree(self):
        with pytest.raises(ValueError, match="below the potential degree"):
            RunConfig.model_validate({"model": {"type": "su2_ym"}, "cutoff": 2})

    def test_seed_required_for_monte_carlo(self):
        with pytest.raises(ValueError, match="seed"):
            RunConfig.model_validate({
                "model": {"type": "so_n_vector", "n": 4}, "cutoff": 3,
                "quadrature": {"rule": "qr_gaussian_montecarlo"},
            })

    def test_seed_accepted_for_monte_carlo(self):
        cfg = RunConfig.model_validate({
            "model": {"type": "so_n_vector", "n": 4}, "cutoff": 3,
            "quadrature": {"rule": "qr_gaussian_montecarlo", "seed": 5},
        })
        assert cfg.quadrature.samples == 2000  # default materialized

    def test_closed_form_basis_vector_only(self):
        with pytest.raises(ValueError, match="vector model"):
            RunConfig.model_validate({
                "model": {"type": "su2_ym"}, "cutoff": 4,
                "projector_method": "closed_form_basis",
            })

    def test_rule_group_mismatch(self):
        with pytest.raises(ValueError, match="SO3"):
            RunConfig.model_validate({
                "model": {"type": "so_n_vector", "n": 2}, "cutoff": 4,
                "quadrature": {"rule": "euler_product"},
            })

    def test_tolerances_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            RunConfig.model_validate({
                **SO2_CFG, "tolerances": {"projector_idempotency": 0.0},
            })

    def test_unknown_fields_rejected(self):
        with pytest.raises(ValueError):
            RunConfig.model_validate({**SO2_CFG, "bogus": 1})


class TestEndpoints:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body == {"status": "ok", "version": __version__,
                        "schema_version": SCHEMA_VERSION}

    def test_schemas_versioned(self, client):
        body = client.get("/schemas").json()
        assert body["schema_version"] == SCHEMA_VERSION
        assert "properties" in body["config"]
        assert "properties" in body["report"]

    def test_basis_endpoint(self, client):
        r = client.post("/basis", json=SO2_CFG)
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "pass"
        assert body["schema_version"] == SCHEMA_VERSION
        assert body["results"]["physical_block_dims"] == [1, 0, 1, 0, 1]
        assert body["config"]["quadrature"]["rule"] == "trapezoid"  # echo resolved

    def test_projector_endpoint(self, client):
        r = client.post("/projector", json=SO2_CFG)
        body = r.json()
        assert r.status_code == 200 and body["status"] == "pass"
        agreement = body["results"]["agreement"]
        assert agreement["nullspace_vs_group_average"] <= 1e-8
        assert agreement["nullspace_vs_closed_form_basis"] <= 1e-10
        assert len(body["results"]["kernel_samples"]) == 5

    def test_spectrum_endpoint(self, client):
        cfg = {**SO2_CFG, "cutoff": 6, "spectrum_sweep": [4, 6]}
        r = client.post("/spectrum", json=cfg)
        body = r.json()
        assert body["status"] == "pass"
        levels = body["results"]["physical_levels"]
        assert [round(l["energy"], 9) for l in levels] == [1.0, 3.0, 5.0]
        assert len(body["results"]["sweep"]) == 2

    def test_evolve_endpoint(self, client):
        r = client.post("/evolve", json=SO2_CFG)
        body = r.json()
        assert body["status"] == "pass"
        assert 0.8 <= body["results"]["global_order"] <= 1.2
        assert 1.8 <= body["results"]["local_order"] <= 2.2
        assert len(body["results"]["ladder"]) == 4

    def test_verify_endpoint_and_determinism(self, client):
        r1 = client.post("/verify", json=SO2_CFG)
        r2 = client.post("/verify", json=SO2_CFG)
        assert r1.json()["status"] == "pass"
        assert r1.json()["fingerprint"] == r2.json()["fingerprint"]

    def test_config_error_gives_422_with_location(self, client):
        r = client.post("/basis", json={"model": {"type": "so_n_vector"}, "cutoff": 4})
        assert r.status_code == 422
        assert any("n >= 2" in str(d.get("msg", "")) for d in r.json()["detail"])

    def test_invariant_violation_reported_as_fail(self, client):
        cfg = {**SO2_CFG, "tolerances": {"projector_idempotency": 1e-300}}
        r = client.post("/projector", json=cfg)
        body = r.json()
        assert r.status_code == 200
        assert body["status"] == "fail"
        failed = [c["name"] for c in body["checks"] if not c["passed"]]
        assert any("idempotency" in name for name in failed)


class TestReportContract:
    def test_every_check_carries_tolerance(self):
        report = run_verify(RunConfig.model_validate(SO2_CFG))
        assert report.checks
        for check in report.checks:
            assert check.tolerance >= 0
            assert isinstance(check.passed, bool)

    def test_render_json_is_deterministic(self):
        cfg = RunConfig.model_validate(SO2_CFG)
        a = render_json(run_verify(cfg))
        b = render_json(run_verify(RunConfig.model_validate(SO2_CFG)))
        assert a == b

    def test_render_csv_sections(self):
        report = run_projector(RunConfig.model_validate(SO2_CFG))
        text = render_csv(report)
        assert "# table: checks" in text
        assert "# table: agreement" in text

    def test_fingerprint_covers_payload(self):
        report = run_verify(RunConfig.model_validate(SO2_CFG))
        tampered = report.model_copy(deep=True)
        tampered.checks[0].value += 1.0
        assert tampered.finalize().fingerprint != report.fingerprint

    def test_ym_report_carries_audit(self):
        cfg = RunConfig.model_validate({"model": {"type": "su2_ym"}, "cutoff": 4})
        report = run_projector(cfg)
        audit = report.results.ym_audit
        assert audit is not None
        assert audit.origin_exact.re == pytest.approx(1.0, abs=1e-12)
        assert audit.origin_verbatim == pytest.approx(2.0**-1.5, rel=1e-12)
        degrees = {row.degree for row in audit.degree_table}
        assert degrees == {0, 1, 2, 3, 4}

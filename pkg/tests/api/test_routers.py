# tests/api/test_routers.py


def test_liveness(test_client):
    resp = test_client.get("/health/live")
    assert resp.status_code == 200
    assert resp.json() == {"ok": True}


def test_readiness_reports_settings(test_client, test_settings):
    resp = test_client.get("/health/ready")
    assert resp.status_code == 200
    data = resp.json()
    assert data["ok"] is True
    assert data["registry"]["ok"] is True


def test_problem_catalogue(test_client):
    resp = test_client.get("/problems")
    assert resp.status_code == 200
    problems = {p["problem_id"]: p for p in resp.json()}
    assert len(problems) == 11
    assert problems["syn5"]["dimension"] == 6
    assert problems["two-circles"]["split_sizes"] == [400, 400, 400]


def test_single_problem(test_client):
    resp = test_client.get("/problems/sinc")
    assert resp.status_code == 200
    assert resp.json()["topology"] == "1-5-1"
    assert test_client.get("/problems/xor").status_code == 404


def _experiment(method, reps=2):
    return {
        "problem": "syn5",
        "method": method,
        "population_size": 8,
        "max_evaluations": 40,
        "repetitions": reps,
        "seed": 5,
    }


def test_run_experiment_and_list_registry(test_client, test_settings):
    resp = test_client.post("/experiments", json=_experiment("DE-SB"))
    assert resp.status_code == 200
    data = resp.json()
    assert data["topology"] == "1-3-1"
    assert [r["seed"] for r in data["runs"]] == [5, 6]
    assert all(r["trace_path"].startswith(test_settings.output_dir) for r in data["runs"])

    runs = test_client.get("/experiments/runs", params={"problem": "syn5"})
    assert runs.status_code == 200
    assert len(runs.json()) == 2
    assert test_client.get("/experiments/runs", params={"method": "CMA-ES"}).json() == []


def test_invalid_experiment_is_rejected(test_client):
    body = _experiment("CMA-ES")
    body["population_size"] = 9
    assert test_client.post("/experiments", json=body).status_code == 422

    body = _experiment("DE")
    body["problem"] = "nope"
    assert test_client.post("/experiments", json=body).status_code == 422


def test_report_endpoint(test_client, test_settings):
    for method in ("DE", "DE-INV-SB", "DE-SB"):
        assert test_client.post("/experiments", json=_experiment(method, reps=3)).status_code == 200

    resp = test_client.post("/reports", json={"input_dir": test_settings.output_dir, "problem": "syn5"})
    assert resp.status_code == 200
    report = resp.json()
    assert [m["method"] for m in report["methods"]] == ["DE", "DE-INV-SB", "DE-SB"]
    assert sum(m["best"] for m in report["methods"]) >= 1
    assert 0.0 <= report["kruskal_wallis_p"] <= 1.0
    assert "**" in report["table"]


def test_report_without_traces_is_404(test_client, tmp_path):
    resp = test_client.post("/reports", json={"input_dir": str(tmp_path / "empty"), "problem": "syn5"})
    assert resp.status_code == 404

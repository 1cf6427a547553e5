from dse.validation import CHECKS, format_report, run_all


def test_all_checks_pass_and_report_errors():
    results = run_all()
    assert [r.name for r in results] == list(CHECKS)
    assert all(r.passed for r in results), format_report(results)
    assert all(r.max_error < r.tolerance for r in results)
    assert sum(r.seconds for r in results) < 60
    report = format_report(results)
    assert report.count("PASS") == len(CHECKS)


def test_corrupted_normalization_fails_unitarity():
    results = {r.name: r for r in run_all(inject_fault="normalization")}
    assert not results["unitarity"].passed
    assert all(r.passed for name, r in results.items() if name != "unitarity")

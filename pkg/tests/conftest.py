from hypothesis import settings

# numba compiles on first call, which would trip per-example deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    marks = dict(report.user_properties).get("criterion")
    if marks is None or (report.when != "call" and not (report.when == "setup" and report.outcome != "passed")):
        return
    n, title = marks
    detail = dict(report.user_properties).get("detail", "")
    outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
    _criteria[n] = (outcome, title, detail)


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        outcome, title, detail = _criteria[n]
        line = f"criterion {n:<3} {outcome}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))

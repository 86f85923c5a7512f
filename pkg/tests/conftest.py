"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_OUTCOMES: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _OUTCOMES.setdefault(number, {"title": title, "failed": False, "ran": 0})
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    entry = _OUTCOMES[props["criterion"]]
    if report.failed:
        entry["failed"] = True
    if report.when == "call":
        entry["ran"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entry = _OUTCOMES[number]
        if entry["failed"]:
            status = "FAIL"
        elif entry["ran"]:
            status = "PASS"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"criterion {number:2d} {status:7s} {entry['title']}")

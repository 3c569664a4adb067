import sys
from pathlib import Path

# lets test modules import the shared oracles
sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    if call.excinfo is None:
        verdict, detail = "PASS", ""
    else:
        verdict = "FAIL"
        detail = str(call.excinfo.value).strip().splitlines()[0][:160]
    _criteria[n] = (title, verdict, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, verdict, detail = _criteria[n]
        line = f"criterion {n:>2}: {verdict}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))

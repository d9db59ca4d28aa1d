from hypothesis import strategies as st

from reasonpath.trace_model import BugTrace, FunctionCall, ReasoningRun

SYMBOLS = [f"m{i}" for i in range(6)]


def call(ftype, arg=None, resolved=True):
    return FunctionCall(ftype, arg, resolved)


def run(steps=(), answer=()):
    return ReasoningRun(tuple(steps), tuple(answer))


def bug(runs, gt="a", bug_id="b1", dataset="bugsinpy"):
    return BugTrace(bug_id, dataset, gt, tuple(runs))


@st.composite
def calls(draw):
    ftype = draw(st.integers(0, 4))
    arg = draw(st.one_of(st.none(), st.sampled_from(SYMBOLS)))
    resolved = True if arg is None else draw(st.booleans())
    return FunctionCall(ftype, arg, resolved)


@st.composite
def bugs(draw, R=None, N=6, bug_id="b1"):
    R = R or draw(st.integers(1, 5))
    runs = []
    for _ in range(R):
        steps = draw(st.lists(calls(), max_size=N))
        answer = draw(st.lists(st.sampled_from(SYMBOLS), max_size=3, unique=True))
        runs.append(ReasoningRun(tuple(steps), tuple(answer)))
    gt = draw(st.sampled_from(SYMBOLS))
    return BugTrace(bug_id, "defects4j", gt, tuple(runs))


# Acceptance criteria append (criterion, passed, detail) here; reported at session end.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok is True else ("SKIP" if ok is None else "FAIL")
        terminalreporter.write_line(f"{status:4}  {name}: {detail}")

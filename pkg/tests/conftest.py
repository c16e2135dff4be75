import pytest

from crowdbid.domain import Campaign, Mode, Participant, Task

# per-task bids used by the W2 PTB example; W1 reuses the first three
DESC = {1: {1: 2.0, 2: 2.0}, 2: {2: 2.5, 3: 2.5}, 3: {3: 1.5}, 4: {4: 2.0}}


def _p(pid, tasks, bid, rep=1.0):
    return Participant(pid, 0.0, 0.0, 30.0, tuple(tasks), bid, DESC[pid], rep)


def make_w1(mode=Mode.REPUTATION_UNAWARE):
    tasks = [Task(j, 0.0, 0.0, 3.0) for j in (1, 2, 3)]
    parts = [_p(1, [1, 2], 4.0), _p(2, [2, 3], 5.0), _p(3, [3], 2.0)]
    return Campaign(tasks, parts, mode)


def make_w2(mode=Mode.REPUTATION_UNAWARE):
    tasks = [Task(j, 0.0, 0.0, 3.0) for j in (1, 2, 3, 4)]
    parts = [_p(1, [1, 2], 4.0), _p(2, [2, 3], 5.0), _p(3, [3], 2.0), _p(4, [4], 10.0)]
    return Campaign(tasks, parts, mode)


@pytest.fixture
def w1():
    return make_w1()


@pytest.fixture
def w2():
    return make_w2()


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def verdicts(request):
    """Collects one ``PASS``/``FAIL`` line per acceptance criterion."""
    return request.config.stash.setdefault(_VERDICTS, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

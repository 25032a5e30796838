import pytest

from ultraballs import UltrametricSpace, validate


def space(points, rows):
    s = validate(list(points), rows)
    assert isinstance(s, UltrametricSpace), f"fixture is not ultrametric: {s}"
    return s


def equilateral(n, d=1):
    pts = [chr(ord("a") + i) for i in range(n)]
    return space(pts, [[0 if i == j else d for j in range(n)] for i in range(n)])


@pytest.fixture
def abc():
    # d(a,b)=1, d(a,c)=d(b,c)=2
    return space("abc", [[0, 1, 2], [1, 0, 2], [2, 2, 0]])


@pytest.fixture
def four():
    # d(a,b)=1, d(a,c)=d(b,c)=2, d(x,d)=3
    return space(
        "abcd",
        [[0, 1, 2, 3], [1, 0, 2, 3], [2, 2, 0, 3], [3, 3, 3, 0]],
    )


@pytest.fixture
def singleton():
    return space("x", [[0]])


@pytest.fixture
def tri5():
    return equilateral(3, 5)


@pytest.fixture
def eq4():
    return equilateral(4)



ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

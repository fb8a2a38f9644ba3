import random

import pytest

from rmk3.families import make_family

_ACCEPTANCE = pytest.StashKey[dict]()


class AcceptanceLedger:
    """Records one line per acceptance criterion; a criterion stays FAIL unless its block completes."""

    def __init__(self, store):
        self.store = store

    def criterion(self, number, title):
        ledger = self

        class _Block:
            def __enter__(self):
                ledger.store[number] = ("FAIL", title, "")
                return self

            def note(self, detail):
                status, t, _ = ledger.store[number]
                ledger.store[number] = (status, t, detail)

            def __exit__(self, exc_type, exc, tb):
                status, t, detail = ledger.store[number]
                if exc_type is None:
                    ledger.store[number] = ("PASS", t, detail)
                else:
                    ledger.store[number] = ("FAIL", t, f"{exc_type.__name__}: {exc}".strip()[:200])
                line = f"criterion {number:>2} {ledger.store[number][0]}  {t}  {ledger.store[number][2]}"
                print(line)
                return False

        return _Block()


@pytest.fixture(scope="session")
def acceptance(request):
    store = request.config.stash.setdefault(_ACCEPTANCE, {})
    return AcceptanceLedger(store)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        status, title, detail = store[n]
        terminalreporter.write_line(f"criterion {n:>2} {status}  {title}  {detail}".rstrip())


@pytest.fixture(scope="session")
def x21():
    return make_family("x2", 1)


@pytest.fixture
def rng():
    return random.Random(20240611)

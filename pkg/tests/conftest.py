import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def acceptance_log(request):
    if not hasattr(request.config, "acceptance_lines"):
        request.config.acceptance_lines = []
    return request.config.acceptance_lines


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("]", 1)[1].split()[0])):
            terminalreporter.write_line(line)
        passed = sum(line.startswith("[PASS]") for line in lines)
        terminalreporter.write_line(f"{passed}/{len(lines)} criteria passed")

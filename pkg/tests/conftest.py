def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", None)
    if not results:
        return
    fmt = config._acceptance_format
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(fmt(number))

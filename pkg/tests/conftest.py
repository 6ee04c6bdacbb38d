def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section(f"acceptance criteria (seed {mod.SEED})")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)

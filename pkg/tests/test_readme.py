import re
from pathlib import Path


def test_quick_start_block_runs_verbatim():
    text = (Path(__file__).resolve().parent.parent / "README.md").read_text()
    block = re.search(r"## Library quick start\n\n```python\n(.*?)```", text, re.S)
    assert block is not None, "quick start block missing from README"
    exec(compile(block.group(1), "README-quickstart", "exec"), {})

import re

from ..errors import EmptyBlock

_FENCE = re.compile(r"```[^\n`]*\n?(.*?)```", re.DOTALL)


def extract_code_block(markdown):
    """Return the body of the first fenced code block, or the text itself.

    An info string on the opening fence (```wcs, ```python) is dropped.
    """
    m = _FENCE.search(markdown)
    if m is None:
        return markdown
    body = m.group(1)
    if not body.strip():
        raise EmptyBlock("code block is empty")
    return body.rstrip("\n")

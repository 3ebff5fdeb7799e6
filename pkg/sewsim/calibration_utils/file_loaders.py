"""Utility functions for loading input files and parsing them with jinja2."""

import json
from io import StringIO
from pathlib import Path

import jinja2
import pandas as pd
import toml

from sewsim.errors import ConfigSyntaxError, SchemaError


def render_template(template: Path, mappings: dict) -> str:
    """Render a jinja2 template with the given mappings."""
    with template.open("r", encoding="utf-8") as file:
        jinja2_template = jinja2.Template(file.read(), keep_trailing_newline=True)
        jinja2_template.globals["compound"] = lambda rate, years: (1.0 + rate) ** years
    return jinja2_template.render(mappings)


def raise_if_file_not_found(file_path: Path) -> None:
    """Raise a FileNotFoundError if the given file doesn't exist."""
    if not file_path.exists():
        msg = f"File {file_path} doesn't exist"
        raise FileNotFoundError(msg)


def load_file(file_path: Path, mappings: dict | None = None) -> str:
    """Load a file and render it with the given mappings."""
    raise_if_file_not_found(file_path)
    if mappings is not None:
        return render_template(file_path, mappings)
    return file_path.read_text(encoding="utf-8")


def parse_json(text: str, source: str = "<string>") -> dict:
    """Parse a JSON document, reporting the position of syntax errors.

    Args:
        text: The JSON document.
        source: Name of the document used in error messages.

    Returns:
        The decoded JSON object.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        msg = f"{source}:{e.lineno}:{e.colno}: {e.msg}"
        raise ConfigSyntaxError(msg, path=source, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        msg = f"{source}: top-level value must be a JSON object, got {type(data).__name__}"
        raise SchemaError(msg, field="<root>")
    return data


def load_json(file_path: Path, mappings: dict | None = None) -> dict:
    """Load a json file and render it with the given mappings."""
    return parse_json(load_file(file_path, mappings or {}), str(file_path))


def load_csv(file_path: Path, columns: list[str]) -> pd.DataFrame:
    """Load a headered CSV file and check that it has the given columns.

    Args:
        file_path: Path to the CSV file.
        columns: Columns that must be present.

    Returns:
        The table, with surrounding whitespace stripped from the header.
    """
    text = load_file(file_path)
    try:
        table = pd.read_csv(
            StringIO(text),
            sep=",",
            decimal=".",
            skipinitialspace=True,
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        msg = f"{file_path}: {e}"
        raise ConfigSyntaxError(msg, path=str(file_path)) from e
    table.columns = [str(column).strip() for column in table.columns]
    if missing := [column for column in columns if column not in table.columns]:
        msg = f"{file_path}: missing column(s) {', '.join(missing)}"
        raise SchemaError(msg, field=f"{file_path.name}:{missing[0]}")
    return table


def load_toml(file_path: Path) -> dict:
    """Load a toml file, reporting the position of syntax errors."""
    raise_if_file_not_found(file_path)
    try:
        return toml.load(file_path)
    except toml.TomlDecodeError as e:
        msg = f"{file_path}:{e.lineno}:{e.colno}: {e.msg}"
        raise ConfigSyntaxError(msg, path=str(file_path), line=e.lineno, column=e.colno) from e

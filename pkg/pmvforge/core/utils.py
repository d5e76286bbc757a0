from collections.abc import Callable
from collections.abc import Sequence
import json
import os

import oyaml as yaml

import audeer

from pmvforge.core.config import default_num_workers


SERIALIZE_ERROR_MESSAGE = "Cannot serialize the following object"


def parse_list(
    value: str | Sequence,
    convert: Callable = str,
) -> list:
    r"""Split comma separated string and convert its items.

    Args:
        value: string like ``"1,2,4"`` or sequence of items
        convert: conversion applied to every item

    Returns:
        converted items

    Raises:
        ValueError: if an item cannot be converted

    Examples:
        >>> parse_list("1, 2,4", int)
        [1, 2, 4]

    """
    if isinstance(value, str):
        value = [item.strip() for item in value.split(",") if item.strip()]
    return [convert(item) for item in audeer.to_list(value)]


def read_file(path: str) -> object:
    r"""Read JSON or YAML file.

    Args:
        path: path to file

    Returns:
        parsed content

    Raises:
        FileNotFoundError: if file does not exist
        RuntimeError: if file cannot be parsed

    """
    path = audeer.path(path)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path) as fp:
        try:
            return yaml.load(fp, Loader=yaml.Loader)
        except yaml.YAMLError as ex:
            raise RuntimeError(f"Failed to parse '{path}': {ex}")


def run_tasks(
    task_func: Callable,
    params: Sequence[tuple[Sequence, dict]],
    *,
    verbose: bool = False,
    task_description: str | None = None,
) -> list:
    r"""Run independent tasks with the default number of workers.

    Results are returned in the order of ``params``.

    """
    return audeer.run_tasks(
        task_func,
        params,
        num_workers=default_num_workers(),
        progress_bar=verbose,
        task_description=task_description,
    )


def write_file(
    path: str,
    obj: object,
):
    r"""Write object to JSON or YAML file.

    Files ending on ``.yaml`` or ``.yml`` are written as YAML,
    all other files as JSON.
    Missing parent folders are created.

    Args:
        path: path to file
        obj: object that should be serialized

    Raises:
        RuntimeError: if ``obj`` cannot be serialized

    """
    path = audeer.path(path)
    audeer.mkdir(os.path.dirname(path))
    if audeer.file_extension(path) in ["yaml", "yml"]:
        try:
            content = yaml.dump(obj)
        except Exception:
            raise RuntimeError(f"{SERIALIZE_ERROR_MESSAGE} to a YAML file:\n'{obj}'")
    else:
        try:
            content = json.dumps(obj, indent=2) + "\n"
        except (TypeError, ValueError):
            raise RuntimeError(f"{SERIALIZE_ERROR_MESSAGE} to a JSON file:\n'{obj}'")
    with open(path, "w") as fp:
        fp.write(content)

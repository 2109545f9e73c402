"""Main entry point for the namedcurves command line."""

import argparse
import logging
import os
import sys

import logzero
from logzero import logger
import toml

from namedcurves import __version__
from namedcurves.cli import run as run_cli
from namedcurves.cli import setup_argparse as setup_argparse_cli
from namedcurves.common import CommonConfig, run_nocmd
from namedcurves.exceptions import NamedCurvesException

#: Paths to search the global configuration in.
GLOBAL_CONFIG_PATHS = ("~/.namedcurvesrc.toml",)


def setup_argparse_only():  # pragma: nocover
    """Wrapper for ``setup_argparse()`` that only returns the parser.

    Only used in sphinx documentation via ``sphinx-argparse``.
    """
    return setup_argparse()[0]


def setup_argparse():
    """Create argument parser."""
    # Construct argument parser and set global options.
    parser = argparse.ArgumentParser(prog="namedcurves")
    parser.add_argument("--verbose", action="store_true", default=False, help="Increase verbosity.")
    parser.add_argument("--version", action="version", version="%%(prog)s %s" % __version__)

    group = parser.add_argument_group("Basic Configuration")
    group.add_argument(
        "--config",
        default=os.environ.get("NAMEDCURVES_CONFIG_PATH", None),
        help="Path to configuration file.",
    )
    group.add_argument(
        "--lut",
        default=os.environ.get("NAMEDCURVES_CNLUT", None),
        help="CNLUT color naming table, defaults to env NAMEDCURVES_CNLUT, else parametric model.",
    )
    group.add_argument(
        "--no-progress",
        dest="progress",
        default=True,
        action="store_false",
        help="Disable progress bars.",
    )

    # Add sub parsers for each argument.
    subparsers = parser.add_subparsers(dest="cmd")
    setup_argparse_cli(subparsers)

    return parser, subparsers


def load_toml_config(config_path):
    """Load the first existing configuration file, ``None`` if there is none."""
    if config_path:
        config_paths = (config_path,)
    else:
        config_paths = GLOBAL_CONFIG_PATHS
    for config_path in config_paths:
        config_path = os.path.expanduser(os.path.expandvars(config_path))
        if os.path.exists(config_path):
            with open(config_path, "rt") as tomlf:
                return toml.load(tomlf)
    logger.info("Could not find any of the global configuration files %s.", config_paths)
    return None


def main(argv=None):
    """Main entry point before parsing command line arguments."""
    # Setup command line parser.
    parser, subparsers = setup_argparse()

    # Actually parse command line arguments.
    args = parser.parse_args(argv)

    # Setup logging incl. verbosity.
    if args.verbose:  # pragma: no cover
        level = logging.DEBUG
    else:
        # Remove module name and line number if not running in debug mode.
        formatter = logzero.LogFormatter(
            fmt="%(color)s[%(levelname)1.1s %(asctime)s]%(end_color)s %(message)s"
        )
        logzero.formatter(formatter)
        level = logging.INFO
    logzero.loglevel(level=level)

    try:
        # Merge configuration from command line/environment args and configuration file.
        toml_config = load_toml_config(args.config)
        config = CommonConfig.create(args, toml_config)

        # Handle the actual command line.
        cmds = {None: run_nocmd}
        cmds.update({name: run_cli for name in subparsers.choices})
        res = cmds[args.cmd](
            config, toml_config, args, parser, subparsers.choices[args.cmd] if args.cmd else None
        )
    except NamedCurvesException as e:
        logger.error("%s", e)
        if args.verbose:  # pragma: no cover
            logger.exception(e)
        return e.exit_code
    except (OSError, toml.TomlDecodeError) as e:
        logger.error("%s", e)
        return 1

    if not res:
        logger.info("All done. Have a nice day!")
    else:  # pragma: nocover
        logger.error("Something did not work out correctly.")
    return res or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Implementation of the ``namedcurves`` sub-commands."""

from namedcurves.cli.apply import setup_argparse as setup_argparse_apply
from namedcurves.cli.bake_lut import setup_argparse as setup_argparse_bake_lut
from namedcurves.cli.decompose import setup_argparse as setup_argparse_decompose
from namedcurves.cli.evaluate import setup_argparse as setup_argparse_eval
from namedcurves.cli.export_cnlut import setup_argparse as setup_argparse_export_cnlut
from namedcurves.cli.fit import setup_argparse as setup_argparse_fit
from namedcurves.cli.fit_batch import setup_argparse as setup_argparse_fit_batch

#: Sub-command names, their help and their argument setup.
COMMANDS = (
    ("decompose", "Write color naming probability maps.", setup_argparse_decompose),
    ("fit", "Fit curves mapping an input to a target image.", setup_argparse_fit),
    ("apply", "Apply a curve file to an image.", setup_argparse_apply),
    ("eval", "Compare two images.", setup_argparse_eval),
    ("fit-batch", "Fit, apply and evaluate a corpus of pairs.", setup_argparse_fit_batch),
    ("bake-lut", "Sample curves into 1D lookup tables.", setup_argparse_bake_lut),
    (
        "export-cnlut",
        "Write the parametric color naming model as table.",
        setup_argparse_export_cnlut,
    ),
)


def setup_argparse(subparsers) -> None:
    """Add one sub parser per command."""
    for name, help_text, setup in COMMANDS:
        setup(subparsers.add_parser(name, help=help_text))


def run(config, toml_config, args, parser, subparser):
    """Dispatch to the command selected on the command line."""
    return args.cli_cmd(config, toml_config, args, parser, subparser)

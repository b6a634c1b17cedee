"""
gascatter Command-Line Application

Entry point of the ``gascatter`` console script. Parses arguments,
configures logging, loads runtime settings and hands over to the
CommandController.

Usage
-----
    $ gascatter spectrum --figure fig1g -o fig1g.csv
    $ gascatter contrast --figure fig5b
    $ gascatter verify --points 10000 --seed 7

Exit codes: 0 success, 1 internal error, 2 configuration or usage error,
3 closed channel, 4 oracle tolerance breach.
"""

import sys
import logging
from typing import List, Optional

from gascatter.config import GascatterConfig, config
from gascatter.errors import GascatterError
from gascatter.cli.parser import create_parser, parse_arguments
from gascatter.controllers import CommandController
from gascatter.utils.parallel import get_evaluation_metrics

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Send log records to stderr; -v selects DEBUG, -q selects WARNING."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one ``gascatter`` command.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name (default: ``sys.argv[1:]``)

    Returns
    -------
    int
        Process exit code
    """
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose, args.quiet)

    if args.command is None and not getattr(args, 'list_figures', False):
        create_parser().print_usage(sys.stderr)
        return 2

    config.update_from(GascatterConfig.load_from_file())

    try:
        return CommandController(args).run()
    except GascatterError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"gascatter: error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"gascatter: error: {e}", file=sys.stderr)
        return 1
    finally:
        logger.debug(str(get_evaluation_metrics()))


if __name__ == '__main__':
    sys.exit(main())

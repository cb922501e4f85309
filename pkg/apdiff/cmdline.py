"""Command line argument parsing infrastructure.

Commands are subclasses of 'command'; defining one is enough to make it
available to main().  Each command's run() returns an exit status, and
errors raised from the library are turned into the exit status their
class declares.

"""

import os
import sys
import json
import logging
import tempfile
import contextlib
from .errors import ApdiffError

log = logging.getLogger(__name__)

class CommandTracker(type):
    """Register every subclass of command under its class name, in the
    order they are defined.

    """
    def __init__(cls, name, bases, attrs):
        super().__init__(name, bases, attrs)
        if not hasattr(cls, "registry"):
            cls.registry = {}
        else:
            cls.registry[name] = cls

class command(metaclass=CommandTracker):
    # One-line summary shown in "runapdiff --help"
    help = None

    @classmethod
    def add_subparsers(cls, parser):
        subparsers = parser.add_subparsers(title="commands")
        for name, c in cls.registry.items():
            sub = subparsers.add_parser(name, help=c.help,
                                        description=c.__doc__)
            sub.set_defaults(command=c.run, command_name=sub.prog)
            c.add_arguments(sub)

    @staticmethod
    def add_arguments(parser):
        pass

    @staticmethod
    def run(args):
        pass

def dispatch(args):
    """Run the command selected on the command line and return its exit
    status.

    """
    try:
        status = args.command(args)
    except ApdiffError as e:
        log.error("%s: %s", type(e).__name__, e)
        print("{}: {}".format(args.command_name, e), file=sys.stderr)
        return e.exit_status
    return 0 if status is None else status

@contextlib.contextmanager
def output_file(path):
    """Open a text file for writing that only appears at 'path' if the
    block completes without an exception.

    Output is written with Unix line endings regardless of platform.

    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".apdiff-")
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise

def write_sidecar(path, metadata):
    """Write run metadata next to a data file.  Data files themselves
    never carry timestamps.

    """
    with output_file(path + ".meta.json") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
        f.write("\n")

'''
Entry point of the SIMPLY STT-MTJ gate simulator.
'''
import sys

from mtj.errors import ConfigError
from runner import EXIT_CONFIG, parse_args, run_command


def main(argv=None):
    try:
        args = parse_args(argv)
    except ConfigError as error:
        print('Configuration error:', error)
        return EXIT_CONFIG
    return run_command(args)


if __name__ == '__main__':
    sys.exit(main())

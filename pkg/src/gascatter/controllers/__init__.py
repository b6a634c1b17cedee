"""
gascatter Controllers

Dispatch of parsed command-line invocations to the library.
"""

from gascatter.controllers.command_controller import CommandController

__all__ = ['CommandController']

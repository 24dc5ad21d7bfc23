import logging
import sys
from os import listdir

from classes.app import RotodecApp
from classes.utilities import commands_directory, commands_manager


class Rotodec(RotodecApp):
    def __init__(self, **kwargs) -> None:
        kwargs.setdefault("prog", "rotodec")
        kwargs.setdefault(
            "description",
            "Rotational decoherence of an anisotropic dielectric particle in thermal radiation.",
        )
        super().__init__(**kwargs)
        self.setup_hook()

    def setup_hook(self) -> None:
        """Load every command module, the error handler included."""
        available_commands = sorted(
            filename[:-3]
            for filename in listdir(commands_directory)
            if filename.endswith(".py") and not filename.startswith("_")
        )
        commands_to_load = [f"commands.{command}" for command in available_commands]
        commands_manager(self, "load", commands_to_load)
        self.log(
            message=f"Commands loaded ({len(commands_to_load)}): {', '.join(commands_to_load)}",
            name="rotodec.setup_hook",
            level=logging.DEBUG,
        )


def main() -> None:
    sys.exit(Rotodec().run(sys.argv[1:]))


if __name__ == "__main__":
    main()

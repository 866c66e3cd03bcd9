from os import environ
import sys
from os.path import exists, join, dirname
from pathlib import Path
from typing import Iterable, Optional


class FileManager:
    """
    A manager of all files in and out of :module:`begfad`.
    """

    instance = None

    def __init__(self) -> None:
        """
        Creates the instance of the :class:`_FileManager` if it does not already exist.
        """
        if not FileManager.instance:
            FileManager.instance = _FileManager()

    def get_settings_files(self) -> list:
        """
        Returns the settings files to load, lowest priority first.

        :return: Paths of existing settings files.
        :rtype: list
        """
        return [path for path in (FileManager.instance.default_settings_file,
                                  FileManager.instance.user_settings_file) if exists(path)]

    def write_output(self, path: Optional[str], header: Iterable[str], body: Iterable[str]) -> None:
        """
        Writes a manifest header followed by the body lines, either to a file or to standard output.

        :param path: Output path; ``None`` or ``"-"`` means standard output.
        :type path: Optional[str]
        :param header: Manifest lines, already comment-prefixed.
        :type header: Iterable[str]
        :param body: Body lines without trailing newlines.
        :type body: Iterable[str]
        """
        text = "".join(line + "\n" for line in header) + "".join(line + "\n" for line in body)
        if path is None or path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        target = Path(path)
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True)
        # Newlines are written verbatim so reruns are byte-identical across platforms.
        with open(target, "w", newline="\n") as file:
            file.write(text)

    @staticmethod
    def read_body(path: str) -> list:
        """
        Reads a file written by :meth:`write_output` and returns the non-manifest lines.

        :param path: The file to read.
        :type path: str
        :return: Body lines, stripped.
        :rtype: list
        """
        with open(path, "r") as file:
            return [line.strip() for line in file if line.strip() and not line.startswith("#")]


class _FileManager:
    """
    Contains the functionality of the :class:`FileManager` and is used to ensure only one :class:`FileManager`
    exists. This is a singleton.
    """

    def __init__(self) -> None:
        """
        Resolves the packaged and user settings files.
        """
        self.default_settings_file = join(dirname(dirname(__file__)), "settings", "default.json")
        self.user_settings_file = environ.get("BEGFAD_SETTINGS") or join(Path.home(), ".begfad", "settings.json")

from os import environ, cpu_count
from json import load
from logging import getLogger
from begfad.io import FileManager

_DEFAULTS = {
    "seed": 20260101,
    "workers": 0,
    "enumeration_cap_sites": 25,
    "store_cap_configs": 200000,
    "transition_cap_states": 200,
    "region_tolerance": 1e-12,
    "cftp_max_epochs": 40,
    "samples_per_side": 10000,
    "sides_2d": [3, 5, 7, 9, 11, 13],
    "sides_3d": [3, 5, 7, 9],
}


class Settings:
    """
    A settings manager for :module:`begfad`.
    """

    instance = None

    def __init__(self) -> None:
        """
        Initializes the singleton if it does not already exist.
        """
        if not Settings.instance:
            Settings.instance = _Settings()

    def get(self, key: str):
        """
        Returns the value of a setting.

        :param key: The setting name.
        :type key: str
        :return: The resolved value.
        """
        return Settings.instance.values[key]

    @property
    def seed(self) -> int:
        """
        The default seed; ``BEGFAD_SEED`` overrides the settings files.
        """
        override = environ.get("BEGFAD_SEED")
        if override:
            return int(override)
        return int(self.get("seed"))

    @property
    def workers(self) -> int:
        """
        Default number of worker processes; 0 in the settings means all available cores.
        """
        workers = int(self.get("workers"))
        return workers if workers > 0 else (cpu_count() or 1)

    @staticmethod
    def reload() -> None:
        """
        Drops the cached settings so the files are read again on next use.
        """
        Settings.instance = None


class _Settings:
    """
    Contains the real workings of the :class:`Settings` and is used to ensure only one :class:`Settings` can exist.
    This is a singleton.
    """

    def __init__(self) -> None:
        """
        Loads the settings files, later files overriding earlier ones.
        """
        logger = getLogger(__name__)
        self.values = dict(_DEFAULTS)
        for path in FileManager().get_settings_files():
            with open(path, "r") as file:
                json_doc = load(file)
            for key, value in json_doc.items():
                if key in _DEFAULTS:
                    self.values[key] = value
                elif key != "name":
                    logger.warning("Ignoring unknown setting %r in %s", key, path)
            logger.debug("Loaded settings from %s", path)

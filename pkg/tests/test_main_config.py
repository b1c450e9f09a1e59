import os
import importlib
import unittest
import pathlib
import sys
from unittest import mock

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

from optlink.signaling import REGISTRY_PATH


class EnvironmentConfigTest(unittest.TestCase):
    def reload_main(self):
        main = importlib.reload(importlib.import_module('main'))
        self.addCleanup(importlib.reload, main)
        return main

    def test_registry_override(self):
        with mock.patch.dict(os.environ, {'OPTLINK_REGISTRY': '/data/flux/required_flux.txt'}):
            main = self.reload_main()
        self.assertEqual(main.DEFAULT_REGISTRY, pathlib.Path('/data/flux/required_flux.txt'))

    def test_registry_default(self):
        with mock.patch.dict(os.environ, {'OPTLINK_REGISTRY': ''}):
            main = self.reload_main()
        self.assertEqual(main.DEFAULT_REGISTRY, REGISTRY_PATH)

    def test_log_level(self):
        with mock.patch.dict(os.environ, {'OPTLINK_LOG_LEVEL': 'debug'}):
            main = self.reload_main()
        self.assertEqual(main.LOG_LEVEL, 'DEBUG')

    def test_extensions_discovered(self):
        cli = importlib.import_module('main').build_cli()
        names = {type(group).__name__ for group in cli.groups}
        self.assertEqual(names, {'BudgetCommands', 'OptimizeCommands', 'OutageCommands', 'PointingCommands'})


if __name__ == '__main__':
    unittest.main()

# ********************************************************************
#  This file is part of povmsim.
#
#        Copyright (C) 2026 the povmsim authors
#
#  povmsim is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  povmsim is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with povmsim. If not, see <https://www.gnu.org/licenses/>.
# ********************************************************************

from setuptools import setup

setup(
    name='povmsim',
    version="0.1.0",
    packages=['povmsim', 'povmsim.test'],
    license='GPL 3.0+',
    description="simulate quantum measurements by projective measurements",
    long_description=open('README.md', encoding="UTF-8").read(),
    long_description_content_type="text/markdown",
    include_package_data=True,
    install_requires=[
      "filelock>=3,<4",
      "frictionless>=5.10.1,<6",
      "numpy>=1.21,<3",
      "pandas>=1,<3",
      "pyyaml>=5,<7",
      "scipy>=1.8,<2",
    ],
    entry_points={
        "console_scripts": [
            "povmsim=povmsim.entrypoint:main",
        ],
    },
    python_requires=">=3.9",
)

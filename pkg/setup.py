import re
from pathlib import Path

from setuptools import find_packages, setup

p = Path(__file__).with_name("tigerhunt") / "__init__.py"
try:
    version = re.findall(r"^__version__ = \"([^']+)\"\r?$", p.read_text(), re.M)[0]
except IndexError:
    raise RuntimeError("Unable to determine version.")

readme = Path(__file__).with_name("README.rst").read_text()


setup(
    name="tigerhunt",
    version=version,
    license="BSD-3-Clause",
    description="exact arithmetic for log terminal surfaces and rank one log del Pezzo surfaces",
    long_description=readme,
    classifiers=[
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    packages=find_packages(exclude=("tests", "tests.*")),
    install_requires=["networkx>=2.6"],
    extras_require={
        "msgpack": ["msgpack>=0.5.5"],
        "ujson": ["ujson>=5"],
    },
    package_data={"tigerhunt.corpus": ["cases/*.txt"]},
    include_package_data=True,
    entry_points={"console_scripts": ["tigerhunt = tigerhunt.cli:main"]},
)

"""Setup script for ikchain"""

import os.path
from setuptools import setup

# README
HERE = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(HERE, "README.md")) as fid:
    README = fid.read()

setup(
    name="ikchain",
    version="0.1.0",
    description="Exact diagonalization, zeroes Bethe ansatz and surface energies of the open Izergin-Korepin chain.",
    long_description=README,
    long_description_content_type="text/markdown",
    license="MIT",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    packages=["ikchain"],
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["ikchain=ikchain.cli:main"]},
)

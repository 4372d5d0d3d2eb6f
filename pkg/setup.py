import setuptools
import os

from glob import glob

_here = os.path.abspath(os.path.dirname(__file__))

with open(os.path.join(_here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

version = {}
with open(os.path.join(_here, "hdrconform", "version.py")) as f:
    exec(f.read(), version)

setuptools.setup(
    name="hdrconform",
    version=version["__version__"],
    description=("HDR10 content and display conformance toolkit."),
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="hdrconform authors",
    license="GPL V3.0",
    packages=setuptools.find_packages(exclude=["docs", "docs.*", "examples", "examples.*"]),
    python_requires=">=3.8",
    install_requires=[
        "setuptools>=33.1.1",
        "numpy>=1.17.0",
        "pandas>=0.25.0",
        "h5py>=2.10.0",
        "numba>=0.48.0",
        "scipy>=1.3.0",
    ],
    extras_require={"test": ["pytest>=5.0"]},
    scripts=["bin/hdrconform"],
    package_data={"hdrconform": ["profiles/*.json"]},
    include_package_data=True,
    data_files=[
        ("share/doc/python3-hdrconform/examples", glob("docs/examples/*")),
        ("share/doc/python3-hdrconform/tests", glob("docs/tests/*")),
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Multimedia :: Video",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
    ],
)

from setuptools import setup, find_packages

setup(
    name="begfad",
    version="2026.10.0",
    description="Perfect sampling and exact enumeration of BEG ground states at the FAD point",
    packages=find_packages(exclude=("tests", "tests.*", "docs")),
    package_data={"begfad": ["settings/*.json"]},
    python_requires=">=3.8",
    install_requires=["numpy>=1.22", "numba>=0.56", "scipy>=1.8", "pandas>=1.3", "tqdm>=4.60"],
    extras_require={"test": ["pytest>=7"], "docs": ["sphinx", "sphinx_rtd_theme"]},
    entry_points={"console_scripts": ["begfad=begfad.cli:main"]},
)

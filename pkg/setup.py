from setuptools import find_packages, setup

setup(
    name="hyperwell",
    version="1.0.0",
    packages=find_packages(include=["hyperwell", "hyperwell.*"]),
    entry_points={
        "console_scripts": [
            "hyperwell=hyperwell.cli:main",
        ],
    },
    python_requires=">=3.11",
    install_requires=[
        "rich>=13.0.0",
        "structlog>=23.0.0",
        "numpy>=1.24",
        "scipy>=1.11",
        "sympy>=1.12",
        "mpmath>=1.3",
        "pandas>=2.0",
    ],
    extras_require={
        "plot": ["matplotlib>=3.7"],
        "dev": [
            "types-setuptools",
        ],
    },
)

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="becc-sim",
    version="0.1.0",
    author="GrupaAI",
    description="Cluster-head election simulator for heterogeneous-energy wireless sensor networks",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["becc_sim*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.10",
    install_requires=[
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
        "numpy>=1.24.0",
        "pandas>=2.0.0",
        "tomli>=2.0.0; python_version < '3.11'",
    ],
    entry_points={
        'console_scripts': [
            'becc-sim=becc_sim.cli:main',
        ],
    },
    zip_safe=False,
)

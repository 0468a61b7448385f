from setuptools import setup

setup(
    name="vsmooth",
    install_requires=[
        "click>=8.0",
        "numpy>=1.20",
        "scipy>=1.5",
        "scikit-learn>=1.1",
    ],
    entry_points={"console_scripts": ["vsmooth = vsmooth.cli:main"]},
)

from setuptools import find_packages, setup


with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="tablegraph",
    version="0.1.0",
    description=(
        "Table structure recognition on table graphs: cell geometry to logical "
        "locations with graph convolutions"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    package_data={"app.transform": ["templates/*.html"]},
    install_requires=[
        "pydantic~=2.10.4",
        "pydantic_core>=2.27.2,<2.28.0",
        "loguru~=0.7.3",
        "numpy",
        "scipy>=1.11",
        "pillow>=10.4,<11.2",
        "jinja2~=3.1.0",
    ],
    extras_require={"test": ["pytest~=8.3.5"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.11",
    entry_points={
        "console_scripts": [
            "tgraph=main:main",
        ],
    },
)

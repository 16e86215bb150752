from setuptools import setup, find_packages
VERSION = "0.1.0"

requirements = [
    "numpy>=1.22",
    "scipy>=1.8",
    "nibabel>=4.0",
    "pillow==9.2.0",
]

setup(
    name="gliomaseg",
    version=VERSION,
    description="Two-stage glioma segmentation with ROI detection and energy-based uncertainty",
    author="Ian Norton",
    author_email="inorton@gmail.com",
    platforms=["any"],
    license="License :: OSI Approved :: MIT License",
    long_description="Binary ROI detector, attention U-Net multiclass segmenter and TTA/energy uncertainty "
                     "for multi-modal brain MRI, trainable on CPU with synthetic phantoms",
    install_requires=requirements,
    packages=find_packages(where="."),
    package_dir={"": "."},
    package_data={"gliomaseg": ["configs/*.json"]},
    entry_points={
        "console_scripts": [
            "gliomaseg = gliomaseg.pipeline.tool:run"
        ]
    },
)

from setuptools import find_packages, setup


setup(
    name='riskbandit',
    version='1.0.0',
    license='MIT',
    include_package_data=True,
    description='Budget-constrained bandit sampling of database-activity risk streams: simulator and benchmark harness.',
    long_description=open("README.rst").read(),
    packages=find_packages('src'),
    package_dir={'': 'src'},
    install_requires=[
        'Django >= 3.1',
        'numpy >= 1.20',
    ],
    python_requires='>=3.7',
    entry_points={
        'console_scripts': [
            'riskbandit = riskbandit.__main__:main',
        ],
    },
    classifiers=[
        'Environment :: Console',
        'Framework :: Django',
        'Framework :: Django :: 3.1',
        'Framework :: Django :: 3.2',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Topic :: Security',
    ],
)

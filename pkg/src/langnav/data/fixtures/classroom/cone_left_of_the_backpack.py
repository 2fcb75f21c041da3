def execute_command(image):
    image_patch = ImagePatch(image)
    backpack_patches = image_patch.find('backpack')
    cone_patches = image_patch.find('cone')
    if len(backpack_patches) == 0 or len(cone_patches) == 0:
        return {'function': 'None', 'error': 'Missing backpack or cone.'}
    reference = backpack_patches[0]
    left_cones = []
    for cone in cone_patches:
        if cone.horizontal_center < reference.horizontal_center:
            left_cones.append(cone)
    if len(left_cones) == 0:
        return {'function': 'None', 'error': 'No cone left of the backpack.'}
    left_cones.sort(key=lambda x: x.horizontal_center)
    target = left_cones[-1]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
